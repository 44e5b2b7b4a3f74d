//! Every checker run against every bundled example.

use dlie_core::chern::{chern_cochain, chern_relation_check, curvature_cochain};
use dlie_core::diffop::diff_order;
use dlie_core::jet::{atiyah_check, roundtrip_check, splitting_from_connection};
use dlie_core::library;
use dlie_core::lie_rinehart::{BracketStructure, SampleConfig};
use dlie_core::nonabelian::EndExtension;
use dlie_core::poly::{Derivation, Poly, PolyMatrix};
use dlie_core::sample;
use dlie_core::tensor::{almost_comm_witness, evaluate, ideal_annihilation_witness, ideal_generators, normal_form, QuotientKind, RewriteConfig, Strategy, TensorElement};
use dlie_core::CheckReport;

fn assert_passed(rep: &CheckReport, ctx: &str) {
    let bad: Vec<_> = rep.failures().collect();
    assert!(bad.is_empty(), "{ctx}: {bad:?}");
}

#[test]
fn extensions_satisfy_axioms() {
    for e in library::lr_examples() {
        let t = e.extension().unwrap();
        assert_passed(&t.check_axioms(SampleConfig::default()), e.name);
    }
}

#[test]
fn connections_obey_laws_and_transfer() {
    for c in library::connections() {
        assert_passed(&c.connection.check_laws(SampleConfig::default()), c.name);
        assert_passed(&c.connection.curvature_transfer_check(SampleConfig::default()).unwrap(), c.name);
    }
}

#[test]
fn psi_correspondence_roundtrips() {
    for c in library::connections() {
        let back = c.connection.to_psi_connection().unwrap().to_connection(c.connection.algebra()).unwrap();
        assert_eq!(back, c.connection, "{}", c.name);
    }
}

#[test]
fn jets_split_exactly_for_identity_psi() {
    for c in library::connections() {
        let rho = &c.connection;
        assert_passed(&atiyah_check(rho.algebra(), rho.rank(), SampleConfig { samples: 20, ..Default::default() }), c.name);
        assert_passed(&roundtrip_check(rho, SampleConfig::default()), c.name);
        let (_, rep) = splitting_from_connection(rho, SampleConfig::default());
        assert_eq!(rep.passed(), rho.psi_is_identity(), "{}: {rep:?}", c.name);
    }
}

#[test]
fn operator_orders() {
    for c in library::connections() {
        let rho = &c.connection;
        let t = rho.algebra();
        let mut rng = sample::rng(5);
        for _ in 0..10 {
            let u = t.random_combination(&mut rng, 2);
            let v = t.random_combination(&mut rng, 2);
            assert!(diff_order(&rho.operator(&u), 1).is_some(), "{}", c.name);
            let bound = if rho.psi_is_identity() { 0 } else { 1 };
            assert!(diff_order(&rho.curvature(&u, &v), bound).is_some(), "{}", c.name);
        }
    }
}

#[test]
fn rewriting_is_idempotent_and_confluent() {
    for name in ["der_xy_one", "euler_pair_x"] {
        let t = library::lr_example(name).unwrap().extension().unwrap();
        let mut rng = sample::rng(11);
        for kind in QuotientKind::ALL {
            for _ in 0..20 {
                let el = TensorElement::random(&mut rng, 2, t.rank(), 3, 1, 3);
                let cfg = RewriteConfig::default();
                let nf = normal_form(&el, &t, kind, cfg).unwrap().element;
                assert_eq!(normal_form(&nf, &t, kind, cfg).unwrap().element, nf);
                if kind.is_tilde() {
                    let right = normal_form(&el, &t, kind, RewriteConfig { strategy: Strategy::Rightmost, ..cfg }).unwrap().element;
                    assert_eq!(right, nf, "{name} {kind:?}: {el}");
                }
            }
        }
    }
}

#[test]
fn evaluation_respects_normal_forms() {
    for c in library::connections().into_iter().filter(|c| c.connection.psi_is_identity()) {
        let t = c.connection.algebra();
        let mut rng = sample::rng(13);
        for kind in [QuotientKind::UTensor, QuotientKind::URho] {
            for _ in 0..10 {
                let el = TensorElement::random(&mut rng, t.nvars(), t.rank(), 3, 1, 3);
                let nf = normal_form(&el, t, kind, RewriteConfig::default()).unwrap().element;
                assert_eq!(evaluate(&nf, &c.connection), evaluate(&el, &c.connection), "{} {kind:?}: {el}", c.name);
            }
        }
    }
}

#[test]
fn commutators_drop_filtration() {
    let t = library::lr_example("der_xy_x").unwrap().extension().unwrap();
    let mut rng = sample::rng(17);
    for kind in [QuotientKind::UTensorTilde, QuotientKind::URhoTilde] {
        for _ in 0..20 {
            let x = TensorElement::random(&mut rng, 2, t.rank(), 3, 1, 2);
            let y = TensorElement::random(&mut rng, 2, t.rank(), 3, 1, 2);
            let rep = almost_comm_witness(&x, &y, &t, kind, RewriteConfig::default()).unwrap();
            assert!(rep.holds, "{x} / {y}: {}", rep.commutator);
        }
    }
}

#[test]
fn annihilator_ideal_detects_curvature_type() {
    let c = library::curvature_type_example();
    let f = c.curvature_type.clone().unwrap();
    let gens = ideal_generators(c.connection.algebra(), &f);
    assert!(ideal_annihilation_witness(&c.connection, &gens).is_none());
    let zero = dlie_core::lie_rinehart::ScalarCochain::zero(2, 2, 2);
    assert!(ideal_annihilation_witness(&c.connection, &ideal_generators(c.connection.algebra(), &zero)).is_some());
    assert!(!c.connection.curvature_type_check(&zero).unwrap());
}

#[test]
fn projective_bases_satisfy_curvature_formula() {
    let dx = Derivation::partial(2, 0);
    let dy = Derivation::partial(2, 1);
    for (name, pb) in library::projective_bases() {
        assert_passed(&pb.idempotent_curvature_check(&dx, &dy), name);
        for (a, b) in [(&dx, &dy), (&dy, &dx), (&dx, &dx)] {
            assert!(pb.rkl_antisymmetrization_witness(a, b).is_none(), "{name}");
        }
    }
}

#[test]
fn end_extension_for_identity_psi() {
    let cfg = SampleConfig { samples: 10, ..Default::default() };
    for c in library::connections().into_iter().filter(|c| c.connection.psi_is_identity()) {
        let end = EndExtension::new(&c.connection).unwrap();
        assert_passed(&end.check_axioms(cfg), c.name);
        assert_passed(&end.check_hom(cfg, false), c.name);
        assert_passed(&end.image_order_check(3, 5, 1), c.name);
    }
}

#[test]
fn corrupted_end_extension_breaks_jacobi() {
    let c = library::connection("nilpotent").unwrap();
    let end = EndExtension::corrupted(&c.connection).unwrap();
    assert!(!end.check_axioms(SampleConfig { samples: 10, ..Default::default() }).passed());
}

#[test]
fn chern_relations() {
    let c = library::curvature_type_example();
    let c1 = chern_cochain(&c.connection, 1).unwrap();
    assert_eq!(c1.get(&[0, 1]), Poly::int(2, 2));
    let r = curvature_cochain(&c.connection).unwrap();
    assert_eq!(r.get(&[0, 1]), PolyMatrix::identity(2, 2));
    for (n, k) in [(4, 2), (6, 3)] {
        let good = library::chern_example(n, true);
        assert_eq!(chern_relation_check(&good.connection, good.curvature_type.as_ref(), k).unwrap(), None);
        let bad = library::chern_example(n, false);
        assert!(chern_relation_check(&bad.connection, None, k).unwrap().is_some());
    }
}

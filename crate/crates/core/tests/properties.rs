use proptest::prelude::*;

use dlie_core::diffop::DiffOperator;
use dlie_core::library;
use dlie_core::lie_rinehart::{BracketStructure, LieRinehartPresentation, ScalarCochain};
use dlie_core::poly::{rat, Derivation, Monomial, Poly};
use dlie_core::sample;
use dlie_core::tensor::{normal_form, QuotientKind, RewriteConfig, TensorElement};

fn poly2() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..3, 0u32..3), -4i64..5), 0..5).prop_map(|terms| {
        Poly::from_terms(2, terms.into_iter().map(|((a, b), c)| (Monomial::from_exponents(vec![a, b]), rat(c))))
    })
}

fn derivation2() -> impl Strategy<Value = Derivation> {
    (poly2(), poly2()).prop_map(|(a, b)| Derivation::new(vec![a, b]))
}

proptest! {
    #[test]
    fn ring_axioms(a in poly2(), b in poly2(), c in poly2()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn display_parses_back(a in poly2()) {
        prop_assert_eq!(Poly::parse(&a.to_string(), 2).unwrap(), a);
    }

    #[test]
    fn derivations_obey_leibniz(d in derivation2(), a in poly2(), b in poly2()) {
        prop_assert_eq!(d.apply(&(&a * &b)), &(&a * &d.apply(&b)) + &(&b * &d.apply(&a)));
    }

    #[test]
    fn derivation_bracket_jacobi(d in derivation2(), e in derivation2(), f in derivation2()) {
        let j = &(&d.bracket(&e.bracket(&f)) + &e.bracket(&f.bracket(&d))) + &f.bracket(&d.bracket(&e));
        prop_assert_eq!(j, Derivation::zero(2));
    }

    #[test]
    fn operator_composition_is_associative(d in derivation2(), e in derivation2(), a in poly2()) {
        let p = DiffOperator::derivation(&d, 1);
        let q = DiffOperator::derivation(&e, 1);
        let m = DiffOperator::scalar(&[(a, Monomial::one(2))]);
        prop_assert_eq!(p.compose(&q).compose(&m), p.compose(&q.compose(&m)));
    }

    #[test]
    fn differential_squares_to_zero(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let der = LieRinehartPresentation::derivations(3);
        let g = ScalarCochain::random(&mut rng, 3, 3, 1, 2);
        prop_assert!(g.differential(&der).differential(&der).is_zero());
    }

    #[test]
    fn pullback_preserves_cocycles(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let der = LieRinehartPresentation::derivations(2);
        let g = ScalarCochain::random(&mut rng, 2, 2, 1, 2);
        let f = g.differential(&der);
        prop_assert!(f.pullback(&library::euler_pair()).is_cocycle(&library::euler_pair()));
    }

    #[test]
    fn bracket_satisfies_leibniz(seed in any::<u64>(), a in poly2()) {
        let t = library::lr_example("der_xy_x").unwrap().extension().unwrap();
        let mut rng = sample::rng(seed);
        let u = t.random_combination(&mut rng, 2);
        let v = t.random_combination(&mut rng, 2);
        let lhs = t.bracket(&u, &v.scale(&a));
        let rhs = &t.bracket(&u, &v).scale(&a) + &v.scale(&t.anchor_of(&u).apply(&a));
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normal_forms_are_fixed_points(seed in any::<u64>()) {
        let t = library::lr_example("euler_pair_x").unwrap().extension().unwrap();
        let mut rng = sample::rng(seed);
        let el = TensorElement::random(&mut rng, 2, t.rank(), 3, 1, 3);
        for kind in QuotientKind::ALL {
            let nf = normal_form(&el, &t, kind, RewriteConfig::default()).unwrap().element;
            prop_assert_eq!(&normal_form(&nf, &t, kind, RewriteConfig::default()).unwrap().element, &nf);
        }
    }
}

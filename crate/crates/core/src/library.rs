//! A small bundled library of Lie-Rinehart algebras, cocycles, connections
//! and projective bases used by the test suites and the command line tool.

use std::collections::BTreeMap;

use crate::connection::Connection;
use crate::dlie::DLieAlgebra;
use crate::error::Result;
use crate::lie_rinehart::{Combination, LieRinehartPresentation, ScalarCochain};
use crate::poly::{parse_poly, Derivation, Poly, PolyMatrix};
use crate::projective::ProjectiveBasis;

fn p(src: &str, nvars: usize) -> Poly {
    parse_poly(src, nvars).expect("library polynomial")
}

fn mat(rows: &[&[&str]], nvars: usize) -> PolyMatrix {
    PolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| p(s, nvars)).collect()).collect())
}

/// A 2-cochain on `Der(Q[x1..xm])` (or on any rank-`rank` algebra) from
/// values on index pairs, 0-based.
pub fn cochain2(nvars: usize, rank: usize, values: &[((usize, usize), &str)]) -> ScalarCochain {
    let mut f = ScalarCochain::zero(nvars, rank, 2);
    for &((i, j), v) in values {
        f.set(&[i, j], p(v, nvars));
    }
    f
}

/// A pair `(L, f)` with `f` a 2-cochain on `Der(A)`.
#[derive(Clone, Debug)]
pub struct LrExample {
    pub name: &'static str,
    pub lr: LieRinehartPresentation,
    pub f: ScalarCochain,
}

impl LrExample {
    pub fn extension(&self) -> Result<DLieAlgebra> {
        DLieAlgebra::build_extension(&self.lr, &self.f)
    }
}

/// `e₁ ↦ ∂x`, `e₂ ↦ x∂x + y∂y` with `[e₁,e₂] = e₁`.
pub fn euler_pair() -> LieRinehartPresentation {
    let anchors = vec![Derivation::partial(2, 0), Derivation::new(vec![p("x", 2), p("y", 2)])];
    let mut br = BTreeMap::new();
    br.insert((0, 1), Combination::basis(2, 2, 0));
    LieRinehartPresentation::new(2, anchors, br)
}

/// The rank-one algebra spanned by the Euler field `x∂x + y∂y`.
pub fn euler_line() -> LieRinehartPresentation {
    LieRinehartPresentation::new(2, vec![Derivation::new(vec![p("x", 2), p("y", 2)])], BTreeMap::new())
}

/// `g(∂x) = xy`, `g(∂y) = x²`, so `d¹g(∂x,∂y) = x`.
pub fn coboundary_example() -> ScalarCochain {
    let der = LieRinehartPresentation::derivations(2);
    let mut g = ScalarCochain::zero(2, 2, 1);
    g.set(&[0], p("x*y", 2));
    g.set(&[1], p("x^2", 2));
    g.differential(&der)
}

/// All `(L, f)` pairs that must pass the D-Lie axiom suite.
pub fn lr_examples() -> Vec<LrExample> {
    vec![
        LrExample { name: "der_x", lr: LieRinehartPresentation::derivations(1), f: ScalarCochain::zero(1, 1, 2) },
        LrExample { name: "der_xy_zero", lr: LieRinehartPresentation::derivations(2), f: ScalarCochain::zero(2, 2, 2) },
        LrExample { name: "der_xy_one", lr: LieRinehartPresentation::derivations(2), f: cochain2(2, 2, &[((0, 1), "1")]) },
        LrExample { name: "der_xy_x", lr: LieRinehartPresentation::derivations(2), f: cochain2(2, 2, &[((0, 1), "x")]) },
        LrExample { name: "der_xy_coboundary", lr: LieRinehartPresentation::derivations(2), f: coboundary_example() },
        LrExample { name: "euler_pair_x", lr: euler_pair(), f: cochain2(2, 2, &[((0, 1), "x")]) },
        LrExample { name: "euler_line", lr: euler_line(), f: cochain2(2, 2, &[((0, 1), "1")]) },
        LrExample {
            name: "der_xyz_const",
            lr: LieRinehartPresentation::derivations(3),
            f: cochain2(3, 3, &[((0, 1), "1"), ((0, 2), "2"), ((1, 2), "-3")]),
        },
    ]
}

pub fn lr_example(name: &str) -> Option<LrExample> {
    lr_examples().into_iter().find(|e| e.name == name)
}

/// `f = z` on `Der(Q[x,y,z])` pairs: not closed, `df(∂x,∂y,∂z) = 1`.
pub fn non_cocycle() -> ScalarCochain {
    cochain2(3, 3, &[((0, 1), "z")])
}

/// A named connection, with the cochain `f` on the non-central generators
/// when the connection is of curvature type `f`.
#[derive(Clone, Debug)]
pub struct ConnectionExample {
    pub name: &'static str,
    pub connection: Connection,
    pub curvature_type: Option<ScalarCochain>,
}

fn ext(name: &str) -> DLieAlgebra {
    lr_example(name).expect("library algebra").extension().expect("library cocycle")
}

pub fn curvature_type_example() -> ConnectionExample {
    let t = ext("der_xy_zero");
    let gammas = vec![mat(&[&["0", "0"], &["0", "0"]], 2), mat(&[&["x", "0"], &["0", "x"]], 2)];
    ConnectionExample {
        name: "curvature_type",
        connection: Connection::with_identity(t, gammas).expect("shapes"),
        curvature_type: Some(cochain2(2, 2, &[((0, 1), "1")])),
    }
}

/// Every library connection; the first entries have `ψ = Id`.
pub fn connections() -> Vec<ConnectionExample> {
    let nilp = vec![mat(&[&["0", "1"], &["0", "0"]], 2), mat(&[&["0", "0"], &["y", "0"]], 2)];
    let mixed = vec![mat(&[&["x", "0"], &["1", "y"]], 2), mat(&[&["0", "y"], &["0", "0"]], 2)];
    let euler = vec![mat(&[&["0", "x"], &["0", "0"]], 2), mat(&[&["1", "0"], &["0", "y"]], 2)];
    let zero = ScalarCochain::zero(2, 2, 2);
    let conn = |t: &str, g: &[PolyMatrix]| Connection::with_identity(ext(t), g.to_vec()).expect("shapes");
    let twisted = conn("der_xy_zero", &nilp);
    vec![
        ConnectionExample { name: "flat", connection: Connection::trivial(ext("der_xy_zero"), 2), curvature_type: Some(zero) },
        ConnectionExample { name: "nilpotent", connection: twisted.clone(), curvature_type: None },
        curvature_type_example(),
        ConnectionExample {
            name: "flat_over_one",
            connection: Connection::trivial(ext("der_xy_one"), 2),
            curvature_type: Some(cochain2(2, 2, &[((0, 1), "-1")])),
        },
        ConnectionExample { name: "mixed_over_x", connection: conn("der_xy_x", &mixed), curvature_type: None },
        ConnectionExample { name: "euler_pair", connection: conn("euler_pair_x", &euler), curvature_type: None },
        ConnectionExample {
            name: "nilpotent_psi_two",
            connection: twisted.with_psi(PolyMatrix::scalar(2, &p("2", 2))).expect("shape"),
            curvature_type: None,
        },
        ConnectionExample {
            name: "nilpotent_psi_idempotent",
            connection: twisted.with_psi(mat(&[&["1", "x"], &["0", "0"]], 2)).expect("shape"),
            curvature_type: None,
        },
    ]
}

pub fn connection(name: &str) -> Option<ConnectionExample> {
    connections().into_iter().find(|c| c.name == name)
}

/// `φ = u w` with `u = (1, x)ᵀ` and `w = (1 − xy, y)`, so `w u = 1`.
pub fn uw_idempotent() -> PolyMatrix {
    let u = PolyMatrix::column(vec![p("1", 2), p("x", 2)]);
    let w = PolyMatrix::row(vec![p("1 - x*y", 2), p("y", 2)]);
    &u * &w
}

pub fn projective_bases() -> Vec<(&'static str, ProjectiveBasis)> {
    let idem = |m: PolyMatrix| ProjectiveBasis::from_idempotent(&m).expect("idempotent");
    vec![
        ("free", ProjectiveBasis::free(2, 2)),
        ("uw", idem(uw_idempotent())),
        ("graph", idem(mat(&[&["1", "0"], &["x", "0"]], 2))),
        ("coordinate", idem(mat(&[&["1", "0"], &["0", "0"]], 2))),
    ]
}

/// Rank-2 connection over `Der(Q[x1..xn])`, `n` even, with
/// `Γ_{2i} = x_{2i−1}·B_i`. With `B_i = Id` it has curvature type `f` where
/// `f(∂_{2i−1},∂_{2i}) = 1`; otherwise `B_i` alternates between `diag(1,0)`
/// and `diag(0,1)` and the curvature is not scalar.
pub fn chern_example(n: usize, curvature_type: bool) -> ConnectionExample {
    assert!(n.is_multiple_of(2) && n >= 2, "chern examples need an even number of variables");
    let t = DLieAlgebra::build_extension(&LieRinehartPresentation::derivations(n), &ScalarCochain::zero(n, n, 2)).expect("zero cocycle");
    let mut gammas = vec![PolyMatrix::zero(2, 2, n); n];
    let mut f = ScalarCochain::zero(n, n, 2);
    for i in 0..n / 2 {
        let x = Poly::var(n, 2 * i);
        let z = Poly::zero(n);
        gammas[2 * i + 1] = if curvature_type {
            PolyMatrix::scalar(2, &x)
        } else if i % 2 == 0 {
            PolyMatrix::from_rows(vec![vec![x, z.clone()], vec![z.clone(), z]])
        } else {
            PolyMatrix::from_rows(vec![vec![z.clone(), z.clone()], vec![z, x]])
        };
        f.set(&[2 * i, 2 * i + 1], Poly::one(n));
    }
    ConnectionExample {
        name: if curvature_type { "chern_scalar" } else { "chern_split" },
        connection: Connection::with_identity(t, gammas).expect("shapes"),
        curvature_type: curvature_type.then_some(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_build() {
        for e in lr_examples() {
            assert!(e.extension().is_ok(), "{}", e.name);
        }
        assert_eq!(coboundary_example(), cochain2(2, 2, &[((0, 1), "x")]));
        assert!(DLieAlgebra::d1f(&non_cocycle()).is_err());
        assert!(connections().len() >= 6);
        assert_eq!(projective_bases().len(), 4);
    }

    #[test]
    fn curvature_types_are_correct() {
        for c in connections() {
            if let Some(f) = &c.curvature_type {
                assert!(c.connection.curvature_type_check(f).unwrap(), "{}", c.name);
            }
        }
        let c = chern_example(4, true);
        assert!(c.connection.curvature_type_check(c.curvature_type.as_ref().unwrap()).unwrap());
    }
}

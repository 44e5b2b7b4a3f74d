//! First-order jets `J¹(E) = E ⊕ L̃ ⊗_A E` for `E = A^r`, the Atiyah
//! sequence `0 → E → J¹(E) → L̃ ⊗_A E → 0`, and the correspondence between
//! right splittings and connections.

use std::collections::BTreeMap;
use std::fmt;

use crate::connection::Connection;
use crate::diffop::{diff_order, DiffOperator};
use crate::dlie::{gen_name, DLieAlgebra};
use crate::error::{Error, Result};
use crate::lie_rinehart::{BracketStructure, Combination, SampleConfig};
use crate::poly::{Poly, PolyMatrix};
use crate::report::CheckReport;
use crate::sample;

/// An element of `L̃ ⊗_A E` in canonical form `Σ u_g ⊗ y_g`: all
/// coefficients sit on the vector side and zero vectors are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetTensor {
    rank: usize,
    nvars: usize,
    parts: BTreeMap<usize, Vec<Poly>>,
}

fn vec_is_zero(v: &[Poly]) -> bool {
    v.iter().all(Poly::is_zero)
}

fn vec_add(a: &mut [Poly], b: &[Poly]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn vec_scale(v: &[Poly], a: &Poly) -> Vec<Poly> {
    v.iter().map(|x| a * x).collect()
}

impl JetTensor {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        JetTensor { rank, nvars, parts: BTreeMap::new() }
    }

    /// `u_g ⊗ y`.
    pub fn pure(g: usize, y: Vec<Poly>) -> Self {
        let nvars = y.first().map(Poly::nvars).unwrap_or(0);
        let mut t = JetTensor::zero(y.len(), nvars);
        t.add_part(g, &y);
        t
    }

    /// `x ⊗ y` for an arbitrary `x ∈ L̃`, normalized with
    /// `(a u_g) ⊗ y = u_g ⊗ a y − D ⊗ σ_g(a) y`.
    pub fn tensor(t: &DLieAlgebra, x: &Combination, y: &[Poly]) -> Self {
        let mut out = JetTensor::zero(y.len(), t.nvars());
        for (g, a) in x.support() {
            out.add_part(g, &vec_scale(y, a));
            if g != 0 {
                let s = t.right_anchor(g).apply(a);
                if !s.is_zero() {
                    out.add_part(0, &vec_scale(y, &-&s));
                }
            }
        }
        out
    }

    pub fn add_part(&mut self, g: usize, y: &[Poly]) {
        assert_eq!(y.len(), self.rank, "vector rank mismatch");
        let slot = self.parts.entry(g).or_insert_with(|| vec![Poly::zero(self.nvars); self.rank]);
        vec_add(slot, y);
        if vec_is_zero(slot) {
            self.parts.remove(&g);
        }
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, &Vec<Poly>)> {
        self.parts.iter().map(|(g, y)| (*g, y))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add(&self, other: &JetTensor) -> JetTensor {
        let mut out = self.clone();
        for (g, y) in other.parts() {
            out.add_part(g, y);
        }
        out
    }

    /// Left action `a·(u ⊗ y) = (a u) ⊗ y`.
    pub fn left_mul(&self, t: &DLieAlgebra, a: &Poly) -> JetTensor {
        let mut out = JetTensor::zero(self.rank, self.nvars);
        for (g, y) in self.parts() {
            out = out.add(&JetTensor::tensor(t, &Combination::term(t.rank(), g, a.clone()), y));
        }
        out
    }

    /// Right action `(u ⊗ y) a = u ⊗ (y a)`.
    pub fn right_mul(&self, a: &Poly) -> JetTensor {
        let mut out = JetTensor::zero(self.rank, self.nvars);
        for (g, y) in self.parts() {
            out.add_part(g, &vec_scale(y, a));
        }
        out
    }
}

impl fmt::Display for JetTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let items: Vec<String> = self
            .parts()
            .map(|(g, y)| format!("{} ⊗ ({})", gen_name(g), y.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "{}", items.join(" + "))
    }
}

/// `(x, t) ∈ E ⊕ L̃ ⊗_A E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetElement {
    pub e: Vec<Poly>,
    pub t: JetTensor,
}

impl JetElement {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        JetElement { e: vec![Poly::zero(nvars); rank], t: JetTensor::zero(rank, nvars) }
    }

    pub fn is_zero(&self) -> bool {
        vec_is_zero(&self.e) && self.t.is_zero()
    }

    pub fn add(&self, other: &JetElement) -> JetElement {
        let mut e = self.e.clone();
        vec_add(&mut e, &other.e);
        JetElement { e, t: self.t.add(&other.t) }
    }

    pub fn left_mul(&self, algebra: &DLieAlgebra, a: &Poly) -> JetElement {
        JetElement { e: vec_scale(&self.e, a), t: self.t.left_mul(algebra, a) }
    }
}

impl fmt::Display for JetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.e.iter().map(ToString::to_string).collect();
        write!(f, "(({}), {})", e.join(", "), self.t)
    }
}

/// `(x, u ⊗ y) a = (x a + π̃(u)(a) y, u ⊗ (y a))`, with `E` carrying the
/// trivial right structure.
pub fn jet_right_action(algebra: &DLieAlgebra, j: &JetElement, a: &Poly) -> JetElement {
    let mut e = vec_scale(&j.e, a);
    for (g, y) in j.t.parts() {
        let da = algebra.anchor(g).apply(a);
        if !da.is_zero() {
            vec_add(&mut e, &vec_scale(y, &da));
        }
    }
    JetElement { e, t: j.t.right_mul(a) }
}

/// `E → J¹(E)`, `x ↦ (x, 0)`.
pub fn inclusion(x: &[Poly]) -> JetElement {
    let nvars = x.first().map(Poly::nvars).unwrap_or(0);
    JetElement { e: x.to_vec(), t: JetTensor::zero(x.len(), nvars) }
}

/// `J¹(E) → L̃ ⊗_A E`.
pub fn projection(j: &JetElement) -> JetTensor {
    j.t.clone()
}

/// A candidate splitting `s(u_g ⊗ y) = (S_g(y), u_g ⊗ y)`, one operator
/// per generator of `L̃` (index 0 is `D`).
#[derive(Clone, Debug, PartialEq)]
pub struct Splitting {
    pub ops: Vec<DiffOperator>,
}

impl Splitting {
    pub fn apply(&self, t: &JetTensor) -> JetElement {
        let mut e = vec![Poly::zero(t.nvars); t.rank];
        for (g, y) in t.parts() {
            vec_add(&mut e, &self.ops[g].apply(y));
        }
        JetElement { e, t: t.clone() }
    }
}

fn random_tensor(rng: &mut sample::SampleRng, algebra: &DLieAlgebra, r: usize, max_degree: u32) -> JetTensor {
    let x = algebra.random_combination(rng, max_degree);
    let y = sample::vector(rng, r, algebra.nvars(), max_degree);
    JetTensor::tensor(algebra, &x, &y)
}

/// Bimodule axioms of `J¹(E)` and exactness of the Atiyah sequence on
/// seeded samples.
pub fn atiyah_check(algebra: &DLieAlgebra, r: usize, cfg: SampleConfig) -> CheckReport {
    let mut rep = CheckReport::new("atiyah_sequence", Some(cfg.seed));
    let m = algebra.nvars();
    let mut rng = sample::rng(cfg.seed);
    let (mut assoc, mut commute, mut zero, mut surj, mut balanced) = (None, None, None, None, None);
    for k in 0..cfg.samples {
        let x = sample::vector(&mut rng, r, m, cfg.max_degree);
        let t = random_tensor(&mut rng, algebra, r, cfg.max_degree);
        let j = JetElement { e: sample::vector(&mut rng, r, m, cfg.max_degree), t: t.clone() };
        let a = sample::poly(&mut rng, m, cfg.max_degree, 3);
        let b = sample::poly(&mut rng, m, cfg.max_degree, 3);
        let lhs = jet_right_action(algebra, &jet_right_action(algebra, &j, &a), &b);
        let rhs = jet_right_action(algebra, &j, &(&a * &b));
        if lhs != rhs {
            assoc = assoc.or_else(|| Some(format!("sample {k}: (j a) b != j (a b) for j = {j}")));
        }
        let lhs = jet_right_action(algebra, &j.left_mul(algebra, &a), &b);
        let rhs = jet_right_action(algebra, &j, &b).left_mul(algebra, &a);
        if lhs != rhs {
            commute = commute.or_else(|| Some(format!("sample {k}: (a j) b != a (j b) for j = {j}")));
        }
        if !projection(&inclusion(&x)).is_zero() {
            zero = zero.or_else(|| Some(format!("sample {k}: projection of inclusion is nonzero")));
        }
        let lift = JetElement { e: vec![Poly::zero(m); r], t: t.clone() };
        if projection(&lift) != t {
            surj = surj.or_else(|| Some(format!("sample {k}: {t} is not hit")));
        }
        // Left and right actions on the tensor part agree with the ones
        // computed through L̃ before normalizing.
        let xg = algebra.random_combination(&mut rng, cfg.max_degree);
        let y = sample::vector(&mut rng, r, m, cfg.max_degree);
        let via_right = JetTensor::tensor(algebra, &algebra.right_mul(&xg, &a), &y);
        let via_vector = JetTensor::tensor(algebra, &xg, &vec_scale(&y, &a));
        if via_right != via_vector {
            balanced = balanced.or_else(|| Some(format!("sample {k}: (x a) ⊗ y != x ⊗ (a y)")));
        }
    }
    rep.record("right_action_associative", assoc);
    rep.record("left_right_commute", commute);
    rep.record("balanced", balanced);
    rep.record("projection_after_inclusion_zero", zero);
    rep.record("projection_surjective", surj);
    rep
}

/// `s(u ⊗ y) = (ρ(u)(y), u ⊗ y)` and its certificates. Right linearity is
/// expected exactly when `ψ = Id` (or all anchors vanish).
pub fn splitting_from_connection(rho: &Connection, cfg: SampleConfig) -> (Splitting, CheckReport) {
    let t = rho.algebra();
    let s = Splitting { ops: (0..t.rank()).map(|g| rho.generator_operator(g)).collect() };
    let mut rep = CheckReport::new("splitting", Some(cfg.seed));
    let r = rho.rank();
    let m = t.nvars();
    let mut rng = sample::rng(cfg.seed);
    let (mut left, mut section, mut right) = (None, None, None);
    for k in 0..cfg.samples {
        let tt = random_tensor(&mut rng, t, r, cfg.max_degree);
        let a = sample::poly(&mut rng, m, cfg.max_degree, 3);
        if s.apply(&tt.left_mul(t, &a)) != s.apply(&tt).left_mul(t, &a) {
            left = left.or_else(|| Some(format!("sample {k}: s(a t) != a s(t) for a = {a}, t = {tt}")));
        }
        if projection(&s.apply(&tt)) != tt {
            section = section.or_else(|| Some(format!("sample {k}: projection(s(t)) != t for t = {tt}")));
        }
        let lhs = s.apply(&tt.right_mul(&a));
        let rhs = jet_right_action(t, &s.apply(&tt), &a);
        if lhs != rhs {
            right = right.or_else(|| Some(format!("sample {k}: s(t a) = {lhs} but s(t) a = {rhs} for a = {a}, t = {tt}")));
        }
    }
    rep.record("left_linear", left);
    rep.record("section", section);
    rep.record("right_linear", right);
    (s, rep)
}

/// Reads `ψ = S_D` and `Γ_g = S_g − ψ π̃_g`; both must be `A`-linear,
/// otherwise there is no connection and the offending generator is named.
pub fn connection_from_splitting(algebra: &DLieAlgebra, s: &Splitting) -> Result<Connection> {
    if s.ops.len() != algebra.rank() {
        return Err(Error::RankMismatch { expected: algebra.rank(), found: s.ops.len() });
    }
    let r = s.ops[0].rows();
    let as_matrix = |op: &DiffOperator, what: String| match diff_order(op, 0) {
        Some(0) => Ok(op.as_matrix().expect("order 0")),
        _ => Err(Error::NoConnection(format!("{what} = {op} is not A-linear"))),
    };
    let psi = as_matrix(&s.ops[0], "S_D".into())?;
    let mut gammas = Vec::with_capacity(algebra.n());
    for g in 1..algebra.rank() {
        let sym = DiffOperator::derivation(algebra.anchor(g), r).left_mul_matrix(&psi);
        gammas.push(as_matrix(&(&s.ops[g] - &sym), format!("S_{} - psi*anchor", gen_name(g)))?);
    }
    Connection::new(algebra.clone(), gammas, psi)
}

/// Connection → splitting → connection reproduces `Γ` and `ψ`.
pub fn roundtrip_check(rho: &Connection, cfg: SampleConfig) -> CheckReport {
    let mut rep = CheckReport::new("jet_roundtrip", Some(cfg.seed));
    let (s, _) = splitting_from_connection(rho, SampleConfig { samples: 0, ..cfg });
    match connection_from_splitting(rho.algebra(), &s) {
        Ok(back) => {
            rep.record(
                "christoffel",
                (back.gammas() != rho.gammas()).then(|| format!("recovered {:?}", back.gammas().iter().map(PolyMatrix::to_string).collect::<Vec<_>>())),
            );
            rep.record("psi", (back.psi() != rho.psi()).then(|| format!("recovered psi = {}", back.psi())));
        }
        Err(e) => rep.fail("christoffel", e.to_string()),
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_rinehart::{LieRinehartPresentation, ScalarCochain};
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, 2).unwrap()
    }

    fn ext() -> DLieAlgebra {
        DLieAlgebra::build_extension(&LieRinehartPresentation::derivations(2), &ScalarCochain::zero(2, 2, 2)).unwrap()
    }

    #[test]
    fn right_action_examples() {
        let t = ext();
        let v = vec![p("1"), p("y")];
        let j = JetElement { e: vec![Poly::zero(2); 2], t: JetTensor::pure(1, v.clone()) };
        assert_eq!(jet_right_action(&t, &j, &Poly::one(2)), j);
        let jx = jet_right_action(&t, &j, &p("x"));
        assert_eq!(jx.e, v);
        assert_eq!(jx.t, JetTensor::pure(1, vec![p("x"), p("x*y")]));
        let e = inclusion(&v);
        assert_eq!(jet_right_action(&t, &e, &p("x+y")), inclusion(&[p("x+y"), p("x*y+y^2")]));
    }

    #[test]
    fn balanced_normalization() {
        let t = ext();
        let xu = Combination::term(3, 1, p("x"));
        let got = JetTensor::tensor(&t, &xu, &[p("1")]);
        let mut want = JetTensor::pure(1, vec![p("x")]);
        want.add_part(0, &[p("-1")]);
        assert_eq!(got, want);
        assert!(atiyah_check(&t, 2, SampleConfig { samples: 20, ..Default::default() }).passed());
    }

    #[test]
    fn trivial_connection_splits_and_roundtrips() {
        let rho = Connection::trivial(ext(), 2);
        let (_, rep) = splitting_from_connection(&rho, SampleConfig::default());
        assert!(rep.passed(), "{rep:?}");
        assert!(roundtrip_check(&rho, SampleConfig::default()).passed());
    }

    #[test]
    fn scaled_psi_breaks_right_linearity_only() {
        let rho = Connection::trivial(ext(), 2).with_psi(PolyMatrix::scalar(2, &p("2"))).unwrap();
        let (_, rep) = splitting_from_connection(&rho, SampleConfig::default());
        assert!(rep.outcome("left_linear").unwrap().is_pass());
        assert!(rep.outcome("section").unwrap().is_pass());
        assert!(!rep.outcome("right_linear").unwrap().is_pass());
        assert!(roundtrip_check(&rho, SampleConfig::default()).passed());
    }

    #[test]
    fn second_order_candidate_is_rejected() {
        let t = ext();
        let rho = Connection::trivial(t.clone(), 1);
        let (mut s, _) = splitting_from_connection(&rho, SampleConfig::default());
        let d = DiffOperator::derivation(t.anchor(1), 1);
        s.ops[1] = d.compose(&d);
        let err = connection_from_splitting(&t, &s).unwrap_err();
        assert!(matches!(err, Error::NoConnection(_)), "{err}");
    }
}

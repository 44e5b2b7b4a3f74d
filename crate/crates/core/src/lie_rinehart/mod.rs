//! Lie-Rinehart presentations `(L, α)` with `L = A^n` free, and their
//! Chevalley-Eilenberg-Rinehart cochains.

mod cochain;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub use cochain::{increasing_tuples, Cochain, CochainValue, MatrixCochain, ScalarCochain};

use crate::poly::{Derivation, Poly};
use crate::report::CheckReport;
use crate::sample::{self, SampleRng};

/// Left `A`-linear combination `Σ cᵢ eᵢ` of generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Combination(pub Vec<Poly>);

impl Combination {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        Combination(vec![Poly::zero(nvars); rank])
    }

    pub fn basis(rank: usize, nvars: usize, i: usize) -> Self {
        Self::term(rank, i, Poly::one(nvars))
    }

    pub fn term(rank: usize, i: usize, a: Poly) -> Self {
        let mut c = Self::zero(rank, a.nvars());
        c.0[i] = a;
        c
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, a: &Poly) -> Combination {
        Combination(self.0.iter().map(|c| a * c).collect())
    }

    /// Nonzero `(index, coefficient)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Poly)> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn fmt_with(&self, name: impl Fn(usize) -> String) -> String {
        let parts: Vec<String> = self
            .support()
            .map(|(i, c)| if c.is_one() { name(i) } else { format!("({})*{}", c, name(i)) })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(|i| format!("e{}", i + 1)))
    }
}

impl Add<&Combination> for &Combination {
    type Output = Combination;
    fn add(self, rhs: &Combination) -> Combination {
        assert_eq!(self.rank(), rhs.rank(), "combination rank mismatch");
        Combination(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Combination> for &Combination {
    type Output = Combination;
    fn sub(self, rhs: &Combination) -> Combination {
        assert_eq!(self.rank(), rhs.rank(), "combination rank mismatch");
        Combination(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Combination {
    type Output = Combination;
    fn neg(self) -> Combination {
        Combination(self.0.iter().map(|c| -c).collect())
    }
}

/// Anything with a free generating set, an anchor into `Der(A)` and
/// bracket structure functions on generators.
///
/// The provided methods extend the generator data by the Leibniz rule
/// `[au, bv] = ab[u,v] + a·π(u)(b)·v − b·π(v)(a)·u`.
pub trait BracketStructure {
    fn nvars(&self) -> usize;
    fn rank(&self) -> usize;
    fn anchor(&self, i: usize) -> &Derivation;
    fn structure(&self, i: usize, j: usize) -> &Combination;

    fn anchor_of(&self, u: &Combination) -> Derivation {
        let mut d = Derivation::zero(self.nvars());
        for (i, c) in u.support() {
            d = &d + &self.anchor(i).scale(c);
        }
        d
    }

    fn bracket(&self, u: &Combination, v: &Combination) -> Combination {
        let n = self.rank();
        assert_eq!(u.rank(), n, "combination rank mismatch");
        assert_eq!(v.rank(), n, "combination rank mismatch");
        let mut out = Combination::zero(n, self.nvars());
        for (i, a) in u.support() {
            for (j, b) in v.support() {
                if i != j {
                    let s = self.structure(i, j);
                    if !s.is_zero() {
                        out = &out + &s.scale(&(a * b));
                    }
                }
                let ab = self.anchor(i).apply(b);
                if !ab.is_zero() {
                    out.0[j] += &(a * &ab);
                }
                let ba = self.anchor(j).apply(a);
                if !ba.is_zero() {
                    out.0[i] -= &(b * &ba);
                }
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Combination {
        Combination::basis(self.rank(), self.nvars(), i)
    }

    fn jacobiator(&self, u: &Combination, v: &Combination, w: &Combination) -> Combination {
        let a = self.bracket(u, &self.bracket(v, w));
        let b = self.bracket(v, &self.bracket(w, u));
        let c = self.bracket(w, &self.bracket(u, v));
        &(&a + &b) + &c
    }

    fn random_combination(&self, rng: &mut SampleRng, max_degree: u32) -> Combination {
        Combination((0..self.rank()).map(|_| sample::poly(rng, self.nvars(), max_degree, 2)).collect())
    }
}

/// Configuration for sampled checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples: usize,
    pub max_degree: u32,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0, samples: 50, max_degree: 2 }
    }
}

/// A Lie-Rinehart algebra `L = A e₁ ⊕ … ⊕ A eₙ` given by its anchor and
/// structure functions `[eᵢ,eⱼ] = Σ c_{ij}^k e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieRinehartPresentation {
    nvars: usize,
    anchors: Vec<Derivation>,
    structure: Vec<Vec<Combination>>,
}

impl LieRinehartPresentation {
    /// Brackets are given for `i < j`; the rest is filled in by antisymmetry.
    /// Unlisted pairs bracket to zero.
    pub fn new(nvars: usize, anchors: Vec<Derivation>, brackets: BTreeMap<(usize, usize), Combination>) -> Self {
        let n = anchors.len();
        assert!(anchors.iter().all(|d| d.nvars() == nvars));
        let mut structure = vec![vec![Combination::zero(n, nvars); n]; n];
        for ((i, j), c) in brackets {
            assert!(i < n && j < n && i != j, "bracket index out of range");
            assert_eq!(c.rank(), n);
            structure[j][i] = -&c;
            structure[i][j] = c;
        }
        LieRinehartPresentation { nvars, anchors, structure }
    }

    /// Raw structure table; antisymmetry is not enforced so that it can be
    /// checked.
    pub fn from_table(nvars: usize, anchors: Vec<Derivation>, structure: Vec<Vec<Combination>>) -> Self {
        LieRinehartPresentation { nvars, anchors, structure }
    }

    /// `Der(Q[x1..xm])` on the basis `∂₁..∂ₘ`.
    pub fn derivations(nvars: usize) -> Self {
        let anchors = (0..nvars).map(|i| Derivation::partial(nvars, i)).collect();
        Self::new(nvars, anchors, BTreeMap::new())
    }

    pub fn anchors(&self) -> &[Derivation] {
        &self.anchors
    }

    /// Runs the axiom suite: antisymmetry of structure functions, anchor
    /// homomorphism and Jacobi, on generators and on sampled combinations.
    pub fn check_axioms(&self, cfg: SampleConfig) -> CheckReport {
        let mut rep = CheckReport::new("lie_rinehart", Some(cfg.seed));
        let n = self.rank();
        let name = |i: usize| format!("e{}", i + 1);

        let mut witness = None;
        'outer: for i in 0..n {
            for j in 0..n {
                let s = &self.structure[i][j] + &self.structure[j][i];
                if !s.is_zero() || (i == j && !self.structure[i][i].is_zero()) {
                    witness = Some(format!("c({},{}) + c({},{}) != 0", name(i), name(j), name(j), name(i)));
                    break 'outer;
                }
            }
        }
        rep.record("antisymmetry", witness);

        let mut rng = sample::rng(cfg.seed);
        let samples: Vec<[Combination; 3]> = (0..cfg.samples)
            .map(|_| {
                [
                    self.random_combination(&mut rng, cfg.max_degree),
                    self.random_combination(&mut rng, cfg.max_degree),
                    self.random_combination(&mut rng, cfg.max_degree),
                ]
            })
            .collect();

        let anchor_hom = |u: &Combination, v: &Combination| {
            let lhs = self.anchor_of(&self.bracket(u, v));
            let rhs = self.anchor_of(u).bracket(&self.anchor_of(v));
            (lhs != rhs).then(|| format!("u = {}, v = {}: {} != {}", u, v, lhs, rhs))
        };
        let gens: Vec<Combination> = (0..n).map(|i| self.basis(i)).collect();
        let mut w = None;
        for u in &gens {
            for v in &gens {
                w = w.or_else(|| anchor_hom(u, v));
            }
        }
        for [u, v, _] in &samples {
            w = w.or_else(|| anchor_hom(u, v));
        }
        rep.record("anchor_homomorphism", w);

        let jac = |u: &Combination, v: &Combination, t: &Combination| {
            let j = self.jacobiator(u, v, t);
            (!j.is_zero()).then(|| format!("u = {}, v = {}, w = {}: jacobiator {}", u, v, t, j))
        };
        let mut w = None;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    w = w.or_else(|| jac(&gens[i], &gens[j], &gens[k]));
                }
            }
        }
        rep.record("jacobi_generators", w);
        let mut w = None;
        for [u, v, t] in &samples {
            w = w.or_else(|| jac(u, v, t));
        }
        rep.record("jacobi_samples", w);
        rep
    }
}

impl BracketStructure for LieRinehartPresentation {
    fn nvars(&self) -> usize {
        self.nvars
    }
    fn rank(&self) -> usize {
        self.anchors.len()
    }
    fn anchor(&self, i: usize) -> &Derivation {
        &self.anchors[i]
    }
    fn structure(&self, i: usize, j: usize) -> &Combination {
        &self.structure[i][j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, 2).unwrap()
    }

    #[test]
    fn leibniz_with_zero_bracket() {
        let l = LieRinehartPresentation::derivations(2);
        let e1 = l.basis(0);
        assert!(l.bracket(&e1, &e1).is_zero());
        let xe2 = Combination::term(2, 1, p("x"));
        assert_eq!(l.bracket(&e1, &xe2), l.basis(1));
    }

    #[test]
    fn matches_derivation_bracket() {
        let l = LieRinehartPresentation::derivations(2);
        let mut rng = sample::rng(7);
        for _ in 0..20 {
            let u = l.random_combination(&mut rng, 2);
            let v = l.random_combination(&mut rng, 2);
            let b = l.bracket(&u, &v);
            assert_eq!(l.anchor_of(&b), l.anchor_of(&u).bracket(&l.anchor_of(&v)));
            // for Der(A) the anchor is the identity on coefficients
            assert_eq!(b.0, l.anchor_of(&b).coeffs().to_vec());
        }
    }

    #[test]
    fn detects_broken_jacobi() {
        // [e1,e2] = e3, [e2,e3] = e1, [e1,e3] = e1 with zero anchor is not Lie.
        let n = 3;
        let mut br = BTreeMap::new();
        br.insert((0, 1), Combination::basis(n, 1, 2));
        br.insert((1, 2), Combination::basis(n, 1, 0));
        br.insert((0, 2), Combination::basis(n, 1, 0));
        let l = LieRinehartPresentation::new(1, vec![Derivation::zero(1); 3], br);
        let rep = l.check_axioms(SampleConfig::default());
        assert!(!rep.passed());
        assert!(matches!(rep.outcome("jacobi_generators"), Some(crate::Outcome::Fail(_))));
    }

    #[test]
    fn derivations_pass() {
        assert!(LieRinehartPresentation::derivations(3).check_axioms(SampleConfig::default()).passed());
    }
}

//! Matrix differential operators `Σ C_β ∂^β` on `A^r` in normal order
//! (coefficients to the left of derivatives).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::{Derivation, Monomial, Poly, PolyMatrix, Rational};
use crate::sample;

/// Multi-index `β` for `∂^β`, stored as an exponent vector.
pub type MultiIndex = Monomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    rows: usize,
    cols: usize,
    nvars: usize,
    terms: BTreeMap<MultiIndex, PolyMatrix>,
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `∂^β` applied to a polynomial.
pub fn partial_multi(p: &Poly, beta: &MultiIndex) -> Poly {
    let mut out = p.clone();
    for (i, &e) in beta.exponents().iter().enumerate() {
        for _ in 0..e {
            if out.is_zero() {
                return out;
            }
            out = out.partial(i);
        }
    }
    out
}

/// All `δ ≤ β` componentwise.
fn sub_indices(beta: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &e in beta.exponents() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=e).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(Monomial::from_exponents).collect()
}

impl DiffOperator {
    pub fn zero(rows: usize, cols: usize, nvars: usize) -> Self {
        DiffOperator { rows, cols, nvars, terms: BTreeMap::new() }
    }

    pub fn identity(r: usize, nvars: usize) -> Self {
        Self::from_matrix(&PolyMatrix::identity(r, nvars))
    }

    /// Multiplication by a matrix.
    pub fn from_matrix(m: &PolyMatrix) -> Self {
        let mut op = Self::zero(m.rows(), m.cols(), m.nvars());
        op.add_term(Monomial::one(m.nvars()), m.clone());
        op
    }

    /// `M · ∂^β`.
    pub fn term(m: &PolyMatrix, beta: MultiIndex) -> Self {
        let mut op = Self::zero(m.rows(), m.cols(), m.nvars());
        op.add_term(beta, m.clone());
        op
    }

    /// The derivation `d` acting entrywise on `A^r`.
    pub fn derivation(d: &Derivation, r: usize) -> Self {
        let m = d.nvars();
        let mut op = Self::zero(r, r, m);
        for (i, c) in d.coeffs().iter().enumerate() {
            op.add_term(Monomial::var(m, i), PolyMatrix::scalar(r, c));
        }
        op
    }

    /// Scalar operator `Σ c_β ∂^β` on `A` itself.
    pub fn scalar(terms: &[(Poly, MultiIndex)]) -> Self {
        let nvars = terms[0].0.nvars();
        let mut op = Self::zero(1, 1, nvars);
        for (c, b) in terms {
            op.add_term(b.clone(), PolyMatrix::scalar(1, c));
        }
        op
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &PolyMatrix)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, beta: MultiIndex, c: PolyMatrix) {
        assert_eq!((c.rows(), c.cols()), (self.rows, self.cols), "operator coefficient shape mismatch");
        assert_eq!(beta.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&beta) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(beta, merged);
        }
    }

    /// Highest `|β|` in the canonical form; `None` for the zero operator.
    pub fn top_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The coefficient matrix when the operator is `A`-linear.
    pub fn as_matrix(&self) -> Option<PolyMatrix> {
        match self.top_degree() {
            None => Some(PolyMatrix::zero(self.rows, self.cols, self.nvars)),
            Some(0) => self.terms.values().next().cloned(),
            Some(_) => None,
        }
    }

    /// Applies the operator to a column vector.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![Poly::zero(self.nvars); self.rows];
        for (beta, c) in &self.terms {
            let dv: Vec<Poly> = v.iter().map(|p| partial_multi(p, beta)).collect();
            for (o, x) in out.iter_mut().zip(c.apply(&dv)) {
                *o += &x;
            }
        }
        out
    }

    /// Left multiplication of every coefficient by `m`.
    pub fn left_mul_matrix(&self, m: &PolyMatrix) -> DiffOperator {
        let mut out = Self::zero(m.rows(), self.cols, self.nvars);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), m * c);
        }
        out
    }

    /// Operator product `self ∘ other`, via
    /// `(C∂^β)(C'∂^γ) = Σ_{δ≤β} binom(β,δ) C ∂^δ(C') ∂^{β−δ+γ}`.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        assert_eq!(self.cols, other.rows, "operator composition shape mismatch");
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.rows, other.cols, self.nvars);
        for (beta, c) in &self.terms {
            let subs = sub_indices(beta);
            for (gamma, c2) in &other.terms {
                for delta in &subs {
                    let coeff: BigInt =
                        beta.exponents().iter().zip(delta.exponents()).map(|(&b, &d)| binom(b, d)).product();
                    let dc2 = c2.map(|p| partial_multi(p, delta));
                    if dc2.is_zero() {
                        continue;
                    }
                    let rest = beta.div(delta).unwrap().mul(gamma);
                    let q = Poly::constant(self.nvars, Rational::from_integer(coeff));
                    out.add_term(rest, (c * &dc2).scale(&q));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &DiffOperator) -> DiffOperator {
        &self.compose(other) - &other.compose(self)
    }

    /// `[self, a·Id]` for a scalar `a`, shapes permitting non-square operators.
    pub fn commutator_scalar(&self, a: &Poly) -> DiffOperator {
        let right = DiffOperator::from_matrix(&PolyMatrix::scalar(self.cols, a));
        let left = DiffOperator::from_matrix(&PolyMatrix::scalar(self.rows, a));
        &self.compose(&right) - &left.compose(self)
    }

    pub fn extend(&self, nvars: usize) -> DiffOperator {
        let mut out = Self::zero(self.rows, self.cols, nvars);
        for (b, c) in &self.terms {
            out.add_term(b.extend(nvars), c.extend(nvars));
        }
        out
    }
}

/// Options for [`diff_order`].
#[derive(Clone, Copy, Debug, Default)]
pub struct DiffOrderConfig {
    /// Extra random multipliers of degree ≤ 2 besides the coordinates.
    pub random_multipliers: usize,
    pub seed: u64,
}

/// Least `l ≤ bound` such that every `(l+1)`-fold iterated commutator with
/// multiplication operators vanishes, or `None` if it exceeds `bound`.
pub fn diff_order(op: &DiffOperator, bound: u32) -> Option<u32> {
    diff_order_with(op, bound, DiffOrderConfig::default())
}

pub fn diff_order_with(op: &DiffOperator, bound: u32, cfg: DiffOrderConfig) -> Option<u32> {
    let m = op.nvars();
    let mut multipliers: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
    let mut rng = sample::rng(cfg.seed);
    for _ in 0..cfg.random_multipliers {
        multipliers.push(sample::poly(&mut rng, m, 2, 3));
    }
    let mut layer = if op.is_zero() { vec![] } else { vec![op.clone()] };
    for l in 0..=bound {
        let mut next: Vec<DiffOperator> = Vec::new();
        for s in &layer {
            for a in &multipliers {
                let c = s.commutator_scalar(a);
                if !c.is_zero() && !next.contains(&c) {
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            return Some(l);
        }
        layer = next;
    }
    None
}

/// A generic vector in `A^r` of degree `d`: entry `k` is `Σ_β t_{k,β} x^β`
/// with fresh indeterminates `t`. Returns the vector over the enlarged ring.
pub fn generic_vector(r: usize, nvars: usize, degree: u32) -> Vec<Poly> {
    let monos = Monomial::all_up_to(nvars, degree);
    let total = nvars + r * monos.len();
    let mut out = Vec::with_capacity(r);
    let mut next = nvars;
    for _ in 0..r {
        let mut p = Poly::zero(total);
        for mono in &monos {
            let mut t = Poly::var(total, next);
            next += 1;
            t = &t * &Poly::monomial(total, mono.extend(total), Rational::one());
            p += &t;
        }
        out.push(p);
    }
    out
}

impl Add<&DiffOperator> for &DiffOperator {
    type Output = DiffOperator;
    fn add(self, rhs: &DiffOperator) -> DiffOperator {
        assert_eq!((self.rows, self.cols, self.nvars), (rhs.rows, rhs.cols, rhs.nvars), "operator shape mismatch");
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }
}

impl Sub<&DiffOperator> for &DiffOperator {
    type Output = DiffOperator;
    fn sub(self, rhs: &DiffOperator) -> DiffOperator {
        self + &(-rhs)
    }
}

impl Neg for &DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        let mut out = DiffOperator::zero(self.rows, self.cols, self.nvars);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), -c);
        }
        out
    }
}

impl Mul<&DiffOperator> for &DiffOperator {
    type Output = DiffOperator;
    fn mul(self, rhs: &DiffOperator) -> DiffOperator {
        self.compose(rhs)
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, c)| {
                if b.is_one() {
                    c.to_string()
                } else {
                    let ds: Vec<String> = b
                        .exponents()
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| if e == 1 { format!("d{}", i + 1) } else { format!("d{}^{}", i + 1, e) })
                        .collect();
                    format!("{}*{}", c, ds.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
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
    fn weyl_relation() {
        let dx = DiffOperator::derivation(&Derivation::partial(2, 0), 1);
        let x = DiffOperator::from_matrix(&PolyMatrix::scalar(1, &p("x")));
        assert_eq!(dx.commutator(&x), DiffOperator::identity(1, 2));
    }

    #[test]
    fn composition_matches_application() {
        let mut rng = sample::rng(3);
        for _ in 0..10 {
            let a = &DiffOperator::derivation(&sample::derivation(&mut rng, 2, 2), 2)
                + &DiffOperator::from_matrix(&sample::matrix(&mut rng, 2, 2, 2, 1));
            let b = DiffOperator::derivation(&sample::derivation(&mut rng, 2, 1), 2).compose(&a);
            let v = sample::vector(&mut rng, 2, 2, 3);
            assert_eq!(a.compose(&b).apply(&v), a.apply(&b.apply(&v)));
        }
    }

    #[test]
    fn orders() {
        let m = PolyMatrix::scalar(2, &p("x*y"));
        assert_eq!(diff_order(&DiffOperator::from_matrix(&m), 3), Some(0));
        let dx = DiffOperator::derivation(&Derivation::partial(2, 0), 2);
        let dy = DiffOperator::derivation(&Derivation::partial(2, 1), 2);
        let op = dx.compose(&dy).compose(&dx);
        assert_eq!(diff_order(&op, 5), Some(3));
        assert_eq!(op.top_degree(), Some(3));
        assert_eq!(diff_order(&op, 2), None);
        assert_eq!(diff_order(&DiffOperator::zero(2, 2, 2), 0), Some(0));
    }

    #[test]
    fn generic_vector_detects_equality() {
        let v = generic_vector(2, 2, 1);
        assert_eq!(v[0].nvars(), 2 + 2 * 3);
        let dx = DiffOperator::derivation(&Derivation::partial(2, 0), 2).extend(8);
        assert!(dx.apply(&v).iter().any(|q| !q.is_zero()));
    }
}

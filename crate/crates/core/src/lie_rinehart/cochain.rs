use std::collections::BTreeMap;
use std::fmt;

use super::{BracketStructure, Combination};
use crate::poly::{Derivation, Poly, PolyMatrix};
use crate::sample::{self, SampleRng};

/// Values a cochain may take: an `A`-module on which derivations act.
pub trait CochainValue: Clone + PartialEq + fmt::Display {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, a: &Poly) -> Self;
    fn derive(&self, d: &Derivation) -> Self;
}

impl CochainValue for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, a: &Poly) -> Self {
        a * self
    }
    fn derive(&self, d: &Derivation) -> Self {
        d.apply(self)
    }
}

impl CochainValue for PolyMatrix {
    fn is_zero(&self) -> bool {
        PolyMatrix::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, a: &Poly) -> Self {
        PolyMatrix::scale(self, a)
    }
    fn derive(&self, d: &Derivation) -> Self {
        d.apply_matrix(self)
    }
}

/// Alternating `A`-multilinear `p`-form on a free module of rank `n`.
///
/// Only values on strictly increasing generator tuples are stored, and only
/// when nonzero, so derived equality is equality of forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<V> {
    nvars: usize,
    rank: usize,
    degree: usize,
    zero: V,
    values: BTreeMap<Vec<usize>, V>,
}

pub type ScalarCochain = Cochain<Poly>;
pub type MatrixCochain = Cochain<PolyMatrix>;

/// Sorts `idx` in place and returns the permutation sign, or `None` on a
/// repeated index.
fn sort_with_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    idx.windows(2).all(|w| w[0] < w[1]).then_some(sign)
}

/// Strictly increasing `p`-tuples from `0..n`.
pub fn increasing_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

impl ScalarCochain {
    pub fn zero(nvars: usize, rank: usize, degree: usize) -> Self {
        Cochain::new(nvars, rank, degree, Poly::zero(nvars))
    }

    /// Random cochain with coefficients of degree at most `max_degree`.
    pub fn random(rng: &mut SampleRng, nvars: usize, rank: usize, degree: usize, max_degree: u32) -> Self {
        let mut c = Self::zero(nvars, rank, degree);
        for t in increasing_tuples(rank, degree) {
            c.set(&t, sample::poly(rng, nvars, max_degree, 2));
        }
        c
    }
}

impl MatrixCochain {
    pub fn zero_matrix(nvars: usize, rank: usize, degree: usize, size: usize) -> Self {
        Cochain::new(nvars, rank, degree, PolyMatrix::zero(size, size, nvars))
    }
}

impl<V: CochainValue> Cochain<V> {
    pub fn new(nvars: usize, rank: usize, degree: usize, zero: V) -> Self {
        Cochain { nvars, rank, degree, zero, values: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn zero_value(&self) -> &V {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Stored values on increasing tuples.
    pub fn values(&self) -> impl Iterator<Item = (&Vec<usize>, &V)> {
        self.values.iter()
    }

    /// Sets `ω(e_{i1},…,e_{ip}) = v`, adjusting the sign when the indices are
    /// not increasing.
    pub fn set(&mut self, idx: &[usize], v: V) {
        assert_eq!(idx.len(), self.degree, "cochain arity mismatch");
        assert!(idx.iter().all(|&i| i < self.rank), "generator index out of range");
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            None => assert!(v.is_zero(), "alternating cochain must vanish on repeated indices"),
            Some(sign) => {
                let v = if sign < 0 { v.neg() } else { v };
                if v.is_zero() {
                    self.values.remove(&sorted);
                } else {
                    self.values.insert(sorted, v);
                }
            }
        }
    }

    /// Value on a generator tuple.
    pub fn get(&self, idx: &[usize]) -> V {
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            None => self.zero.clone(),
            Some(sign) => match self.values.get(&sorted) {
                None => self.zero.clone(),
                Some(v) if sign > 0 => v.clone(),
                Some(v) => v.neg(),
            },
        }
    }

    /// Value on arbitrary `A`-combinations, by multilinear expansion.
    pub fn eval(&self, args: &[Combination]) -> V {
        assert_eq!(args.len(), self.degree, "cochain arity mismatch");
        let mut acc = self.zero.clone();
        let mut idx = Vec::with_capacity(self.degree);
        self.eval_rec(args, &mut idx, &Poly::one(self.nvars), &mut acc);
        acc
    }

    fn eval_rec(&self, args: &[Combination], idx: &mut Vec<usize>, coeff: &Poly, acc: &mut V) {
        let k = idx.len();
        if k == args.len() {
            let v = self.get(idx);
            if !v.is_zero() {
                *acc = acc.add(&v.scale(coeff));
            }
            return;
        }
        for (i, c) in args[k].support() {
            if idx.contains(&i) {
                continue;
            }
            idx.push(i);
            self.eval_rec(args, idx, &(coeff * c), acc);
            idx.pop();
        }
    }

    /// The Chevalley-Eilenberg-Rinehart differential
    /// `dω(x₀..x_p) = Σ (−1)^i α(xᵢ)ω(..x̂ᵢ..) + Σ_{i<j} (−1)^{i+j} ω([xᵢ,xⱼ], ..x̂ᵢ..x̂ⱼ..)`.
    pub fn differential<L: BracketStructure + ?Sized>(&self, l: &L) -> Cochain<V> {
        assert_eq!(l.rank(), self.rank, "cochain rank does not match the algebra");
        let p = self.degree;
        let mut out = Cochain::new(self.nvars, self.rank, p + 1, self.zero.clone());
        for t in increasing_tuples(self.rank, p + 1) {
            let mut acc = self.zero.clone();
            for i in 0..=p {
                let rest: Vec<usize> = t.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &g)| g).collect();
                let term = self.get(&rest).derive(l.anchor(t[i]));
                acc = if i % 2 == 0 { acc.add(&term) } else { acc.add(&term.neg()) };
            }
            for i in 0..=p {
                for j in i + 1..=p {
                    let br = l.structure(t[i], t[j]);
                    if br.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> =
                        t.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &g)| g).collect();
                    let mut term = self.zero.clone();
                    for (k, c) in br.support() {
                        let mut args = vec![k];
                        args.extend_from_slice(&rest);
                        term = term.add(&self.get(&args).scale(c));
                    }
                    acc = if (i + j) % 2 == 0 { acc.add(&term) } else { acc.add(&term.neg()) };
                }
            }
            out.set(&t, acc);
        }
        out
    }

    /// `None` when `dω = 0`; otherwise the first generator tuple where it fails.
    pub fn cocycle_witness<L: BracketStructure + ?Sized>(&self, l: &L) -> Option<String> {
        let d = self.differential(l);
        d.values.iter().next().map(|(t, v)| {
            let args: Vec<String> = t.iter().map(|i| format!("e{}", i + 1)).collect();
            format!("d(f)({}) = {}", args.join(","), v)
        })
    }

    pub fn is_cocycle<L: BracketStructure + ?Sized>(&self, l: &L) -> bool {
        self.cocycle_witness(l).is_none()
    }

    /// Pullback along the anchor: `α*ω(e_{i1},…) = ω(α(e_{i1}),…)`, where
    /// `self` is a cochain on `Der(A)` in the basis `∂₁..∂ₘ`.
    pub fn pullback<L: BracketStructure + ?Sized>(&self, l: &L) -> Cochain<V> {
        assert_eq!(self.rank, self.nvars, "pullback source must be a cochain on Der(A)");
        let images: Vec<Combination> = (0..l.rank()).map(|i| Combination(l.anchor(i).coeffs().to_vec())).collect();
        let mut out = Cochain::new(self.nvars, l.rank(), self.degree, self.zero.clone());
        for t in increasing_tuples(l.rank(), self.degree) {
            let args: Vec<Combination> = t.iter().map(|&i| images[i].clone()).collect();
            out.set(&t, self.eval(&args));
        }
        out
    }

    pub fn add(&self, other: &Cochain<V>) -> Cochain<V> {
        assert_eq!((self.rank, self.degree), (other.rank, other.degree), "cochain shape mismatch");
        let mut out = self.clone();
        for (t, v) in &other.values {
            let cur = out.get(t);
            out.set(t, cur.add(v));
        }
        out
    }

    pub fn neg(&self) -> Cochain<V> {
        let mut out = self.clone();
        for v in out.values.values_mut() {
            *v = v.neg();
        }
        out
    }

    pub fn sub(&self, other: &Cochain<V>) -> Cochain<V> {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: &Poly) -> Cochain<V> {
        let mut out = Cochain::new(self.nvars, self.rank, self.degree, self.zero.clone());
        for (t, v) in &self.values {
            out.set(t, v.scale(a));
        }
        out
    }

    pub fn map<W: CochainValue>(&self, zero: W, f: impl Fn(&V) -> W) -> Cochain<W> {
        let mut out = Cochain::new(self.nvars, self.rank, self.degree, zero);
        for (t, v) in &self.values {
            out.set(t, f(v));
        }
        out
    }
}

impl<V: CochainValue> fmt::Display for Cochain<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(t, v)| {
                let args: Vec<String> = t.iter().map(|i| (i + 1).to_string()).collect();
                format!("({}) -> {}", args.join(","), v)
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_rinehart::LieRinehartPresentation;
    use crate::poly::parse_poly;

    fn p(s: &str, m: usize) -> Poly {
        parse_poly(s, m).unwrap()
    }

    #[test]
    fn alternating_storage() {
        let mut f = ScalarCochain::zero(2, 2, 2);
        f.set(&[1, 0], p("x", 2));
        assert_eq!(f.get(&[0, 1]), p("-x", 2));
        assert!(f.get(&[1, 1]).is_zero());
    }

    #[test]
    fn constant_cocycle_on_plane() {
        let l = LieRinehartPresentation::derivations(2);
        let mut f = ScalarCochain::zero(2, 2, 2);
        f.set(&[0, 1], p("1", 2));
        assert!(f.is_cocycle(&l));
        // on a plane every 2-form is closed: there are no 3-tuples
        f.set(&[0, 1], p("x*y^2", 2));
        assert!(f.is_cocycle(&l));
    }

    #[test]
    fn six_term_formula_in_three_variables() {
        // f(∂x,∂y) = z on Q[x,y,z]; by the six-term expansion
        // df(∂x,∂y,∂z) = ∂x f(∂y,∂z) − ∂y f(∂x,∂z) + ∂z f(∂x,∂y) = ∂z(z) = 1.
        let l = LieRinehartPresentation::derivations(3);
        let mut f = ScalarCochain::zero(3, 3, 2);
        f.set(&[0, 1], p("z", 3));
        let df = f.differential(&l);
        assert_eq!(df.get(&[0, 1, 2]), p("1", 3));
        assert!(!f.is_cocycle(&l));
    }

    #[test]
    fn multilinear_eval() {
        let mut f = ScalarCochain::zero(2, 2, 2);
        f.set(&[0, 1], p("1", 2));
        let u = Combination(vec![p("x", 2), p("1", 2)]);
        let v = Combination(vec![p("y", 2), p("x", 2)]);
        // f(x e1 + e2, y e1 + x e2) = x·x − 1·y
        assert_eq!(f.eval(&[u, v]), p("x^2 - y", 2));
    }
}

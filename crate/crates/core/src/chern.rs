//! Cup powers of 2-cochains, the curvature cochain of a connection with
//! `ψ = Id`, trace Chern cochains and the relations
//! `r^{k−1} c_k = c₁^k` for connections of curvature type `f`.
//!
//! Every identity here is checked as an exact identity of cochains, which is
//! stronger than the corresponding statement in cohomology.

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::lie_rinehart::{increasing_tuples, CochainValue};
use crate::lie_rinehart::{BracketStructure, Cochain, MatrixCochain, SampleConfig, ScalarCochain};
use crate::poly::{rat, Poly, PolyMatrix};
use crate::report::CheckReport;
use crate::sample;

/// Cochain values that can be multiplied inside a cup product.
pub trait CupValue: CochainValue {
    fn mul(&self, other: &Self) -> Self;
}

impl CupValue for Poly {
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl CupValue for PolyMatrix {
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// The `(2,…,2)`-shuffles of `0..2k`: orderings into `k` increasing pairs,
/// with the sign of the underlying permutation.
pub fn pair_shuffles(k: usize) -> Vec<(i32, Vec<(usize, usize)>)> {
    fn rec(left: &mut Vec<usize>, perm: &mut Vec<usize>, out: &mut Vec<(i32, Vec<(usize, usize)>)>) {
        if left.is_empty() {
            let pairs = perm.chunks(2).map(|c| (c[0], c[1])).collect();
            out.push((permutation_sign(perm), pairs));
            return;
        }
        for a in 0..left.len() {
            for b in a + 1..left.len() {
                let (x, y) = (left[a], left[b]);
                let rest: Vec<usize> = left.iter().copied().filter(|&v| v != x && v != y).collect();
                let saved = std::mem::replace(left, rest);
                perm.push(x);
                perm.push(y);
                rec(left, perm, out);
                perm.truncate(perm.len() - 2);
                *left = saved;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..2 * k).collect(), &mut Vec::new(), &mut out);
    out
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `f^k(x₁..x_{2k}) = Σ_σ sgn(σ) f(x_{σ1},x_{σ2}) ⋯ f(x_{σ(2k−1)},x_{σ(2k)})`
/// over `(2,…,2)`-shuffles, with no normalizing factor. For matrix values
/// the factors are multiplied in the displayed order.
pub fn cup_power<V: CupValue>(f: &Cochain<V>, k: usize) -> Cochain<V> {
    assert!(k >= 1, "cup power needs k >= 1");
    assert_eq!(f.degree(), 2, "cup power is defined for 2-cochains");
    let shuffles = pair_shuffles(k);
    let minus_one = Poly::constant(f.nvars(), rat(-1));
    let mut out = Cochain::new(f.nvars(), f.rank(), 2 * k, f.zero_value().clone());
    for t in increasing_tuples(f.rank(), 2 * k) {
        let mut acc = f.zero_value().clone();
        for (sign, pairs) in &shuffles {
            let mut term: Option<V> = None;
            for &(a, b) in pairs {
                let v = f.get(&[t[a], t[b]]);
                if v.is_zero() {
                    term = Some(f.zero_value().clone());
                    break;
                }
                term = Some(match term {
                    None => v,
                    Some(prev) => prev.mul(&v),
                });
            }
            let term = term.expect("k >= 1");
            if term.is_zero() {
                continue;
            }
            acc = acc.add(&if *sign < 0 { term.scale(&minus_one) } else { term });
        }
        out.set(&t, acc);
    }
    out
}

/// `(x,y) ↦ R(x,y)` on the `n` non-central generators, as matrices.
pub fn curvature_cochain(rho: &Connection) -> Result<MatrixCochain> {
    if !rho.psi_is_identity() {
        return Err(Error::Precondition("curvature cochain requires psi = Id".into()));
    }
    let t = rho.algebra();
    let n = t.n();
    let mut c = MatrixCochain::zero_matrix(t.nvars(), n, 2, rho.rank());
    for ij in increasing_tuples(n, 2) {
        let m = rho.curvature_matrix(&t.basis(ij[0] + 1), &t.basis(ij[1] + 1))?;
        c.set(&ij, m);
    }
    Ok(c)
}

/// `R(u,v) = −R(v,u)` on seeded pairs.
pub fn curvature_antisymmetry_check(rho: &Connection, cfg: SampleConfig) -> Result<CheckReport> {
    let mut rep = CheckReport::new("curvature_antisymmetry", Some(cfg.seed));
    let t = rho.algebra();
    let mut rng = sample::rng(cfg.seed);
    let mut w = None;
    for k in 0..cfg.samples {
        let u = t.random_combination(&mut rng, cfg.max_degree);
        let v = t.random_combination(&mut rng, cfg.max_degree);
        if rho.curvature_matrix(&u, &v)? != -&rho.curvature_matrix(&v, &u)? {
            w = w.or_else(|| Some(format!("sample {k}")));
        }
    }
    rep.record("antisymmetric", w);
    Ok(rep)
}

/// `c_k = tr(R^k)`.
pub fn chern_cochain(rho: &Connection, k: usize) -> Result<ScalarCochain> {
    let r = curvature_cochain(rho)?;
    let rk = cup_power(&r, k);
    Ok(rk.map(Poly::zero(rk.nvars()), PolyMatrix::trace))
}

/// Checks `r^{k−1} c_k − c₁^k = 0` on every generator `2k`-tuple. With
/// `f` supplied, the connection must first be of curvature type `f`.
/// Returns `None` when the relation holds, else the first failing tuple.
pub fn chern_relation_check(rho: &Connection, f: Option<&ScalarCochain>, k: usize) -> Result<Option<String>> {
    if let Some(f) = f {
        if let Some(w) = rho.curvature_type_witness(f)? {
            return Err(Error::Precondition(format!("not of curvature type f: {w}")));
        }
    }
    let ck = chern_cochain(rho, k)?;
    let c1 = chern_cochain(rho, 1)?;
    let c1k = cup_power(&c1, k);
    let factor = Poly::constant(ck.nvars(), rat(rho.rank() as i64).pow(k as i32 - 1));
    let lhs = ck.scale(&factor);
    for t in increasing_tuples(ck.rank(), 2 * k) {
        let (a, b) = (lhs.get(&t), c1k.get(&t));
        if a != b {
            return Ok(Some(format!("at {:?}: r^(k-1) c_k = {} but c_1^k = {}", t.iter().map(|i| i + 1).collect::<Vec<_>>(), a, b)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over the full symmetric group, divided by `2^k`.
    fn oracle(f: &ScalarCochain, args: &[usize]) -> Poly {
        let n = args.len();
        let mut acc = Poly::zero(f.nvars());
        let mut perm: Vec<usize> = (0..n).collect();
        fn heap(k: usize, perm: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
            if k == 1 {
                visit(perm);
                return;
            }
            for i in 0..k {
                heap(k - 1, perm, visit);
                let j = if k.is_multiple_of(2) { i } else { 0 };
                perm.swap(j, k - 1);
            }
        }
        heap(n, &mut perm, &mut |p| {
            let mut term = Poly::constant(f.nvars(), rat(permutation_sign(p) as i64));
            for c in p.chunks(2) {
                term = &term * &f.get(&[args[c[0]], args[c[1]]]);
            }
            acc += &term;
        });
        acc.scale(&crate::poly::ratio(1, 1 << (n / 2)))
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(pair_shuffles(1).len(), 1);
        assert_eq!(pair_shuffles(2).len(), 6);
        assert_eq!(pair_shuffles(3).len(), 90);
    }

    #[test]
    fn constant_square() {
        let mut f = ScalarCochain::zero(1, 4, 2);
        f.set(&[0, 1], Poly::one(1));
        f.set(&[2, 3], Poly::one(1));
        let f2 = cup_power(&f, 2);
        assert_eq!(f2.get(&[0, 1, 2, 3]), Poly::int(1, 2));
        assert_eq!(f2.get(&[0, 1, 2, 3]), oracle(&f, &[0, 1, 2, 3]));
        assert_eq!(cup_power(&f, 1), f);
    }

    #[test]
    fn random_matches_oracle() {
        let mut rng = sample::rng(3);
        for _ in 0..5 {
            let f = ScalarCochain::random(&mut rng, 2, 6, 2, 1);
            let f3 = cup_power(&f, 3);
            assert_eq!(f3.get(&[0, 1, 2, 3, 4, 5]), oracle(&f, &[0, 1, 2, 3, 4, 5]));
            let f2 = cup_power(&f, 2);
            for t in increasing_tuples(6, 4) {
                assert_eq!(f2.get(&t), oracle(&f, &t));
            }
        }
    }

    #[test]
    fn scalar_matrix_consistency() {
        let mut rng = sample::rng(9);
        let g = ScalarCochain::random(&mut rng, 2, 4, 2, 1);
        let m = g.map(PolyMatrix::zero(2, 2, 2), |p| PolyMatrix::scalar(2, p));
        let lhs = cup_power(&m, 2);
        let rhs = cup_power(&g, 2).map(PolyMatrix::zero(2, 2, 2), |p| PolyMatrix::scalar(2, p));
        assert_eq!(lhs, rhs);
    }
}

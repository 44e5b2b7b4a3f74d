//! Seeded random polynomials, derivations and matrices for sampled checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{rat, Derivation, Monomial, Poly, PolyMatrix};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial of total degree at most `max_degree` with small integer
/// coefficients and at most `max_terms` terms.
pub fn poly(rng: &mut SampleRng, nvars: usize, max_degree: u32, max_terms: usize) -> Poly {
    let monos = Monomial::all_up_to(nvars, max_degree);
    let nterms = rng.gen_range(1..=max_terms.max(1));
    let mut p = Poly::zero(nvars);
    for _ in 0..nterms {
        let m = monos[rng.gen_range(0..monos.len())].clone();
        let c = rng.gen_range(-3i64..=3);
        p.add_term(m, rat(c));
    }
    p
}

/// Like [`poly`] but never zero.
pub fn nonzero_poly(rng: &mut SampleRng, nvars: usize, max_degree: u32, max_terms: usize) -> Poly {
    loop {
        let p = poly(rng, nvars, max_degree, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn derivation(rng: &mut SampleRng, nvars: usize, max_degree: u32) -> Derivation {
    Derivation::new((0..nvars).map(|_| poly(rng, nvars, max_degree, 2)).collect())
}

pub fn matrix(rng: &mut SampleRng, rows: usize, cols: usize, nvars: usize, max_degree: u32) -> PolyMatrix {
    PolyMatrix::from_rows(
        (0..rows).map(|_| (0..cols).map(|_| poly(rng, nvars, max_degree, 2)).collect()).collect(),
    )
}

pub fn vector(rng: &mut SampleRng, len: usize, nvars: usize, max_degree: u32) -> Vec<Poly> {
    (0..len).map(|_| poly(rng, nvars, max_degree, 3)).collect()
}

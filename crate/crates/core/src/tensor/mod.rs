//! The tensor algebra `T*_k(L̃)` on letters `(monomial, generator)` and its
//! quotient rings, computed by rewriting to normal form.

mod parse;
mod rewrite;
mod suite;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;

pub use parse::parse_tensor;
pub use rewrite::{
    almost_comm_witness, evaluate, filtration_degree, ideal_annihilation_witness, ideal_generators, normal_form,
    AlmostCommReport, NormalForm, QuotientKind, RewriteConfig, Strategy,
};
pub use suite::{almost_comm_check, evaluation_check, normal_form_check, TensorSample};

use crate::dlie::gen_name;
use crate::poly::{Monomial, Poly, Rational};
use crate::sample::SampleRng;

/// A letter `m·g` with a monomial coefficient; generator 0 is `D`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub coeff: Monomial,
    pub gen: usize,
}

pub type Word = Vec<Letter>;

/// Finite `Q`-linear combination of words. The empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorElement {
    nvars: usize,
    terms: BTreeMap<Word, Rational>,
}

impl TensorElement {
    pub fn zero(nvars: usize) -> Self {
        TensorElement { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::word(nvars, Vec::new(), Rational::one())
    }

    pub fn word(nvars: usize, w: Word, c: Rational) -> Self {
        let mut t = Self::zero(nvars);
        t.add_word(w, c);
        t
    }

    /// The single letter `a·g`, split over the monomials of `a`.
    pub fn letter(a: &Poly, gen: usize) -> Self {
        let mut t = Self::zero(a.nvars());
        for (m, c) in a.terms() {
            t.add_word(vec![Letter { coeff: m.clone(), gen }], c.clone());
        }
        t
    }

    /// The generator `g` with coefficient 1.
    pub fn generator(nvars: usize, gen: usize) -> Self {
        Self::letter(&Poly::one(nvars), gen)
    }

    /// A scalar `a ∈ A`, represented as `a·D`.
    pub fn scalar(a: &Poly) -> Self {
        Self::letter(a, 0)
    }

    pub fn from_combination(c: &crate::lie_rinehart::Combination) -> Self {
        let nvars = c.coeff(0).nvars();
        let mut t = Self::zero(nvars);
        for (i, a) in c.support() {
            t = t.add(&Self::letter(a, i));
        }
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_word(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(w.iter().all(|l| l.coeff.nvars() == self.nvars));
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Word degree: the longest word, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> TensorElement {
        let mut out = Self::zero(self.nvars);
        for (w, a) in &self.terms {
            out.add_word(w.clone(), a * c);
        }
        out
    }

    /// Concatenation product.
    pub fn multiply(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.nvars, other.nvars, "tensor elements over different rings");
        let mut out = Self::zero(self.nvars);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                out.add_word(w, c1 * c2);
            }
        }
        out
    }

    pub fn commutator(&self, other: &TensorElement) -> TensorElement {
        self.multiply(other).sub(&other.multiply(self))
    }

    /// Random element: up to `max_terms` words of length ≤ `max_len` over
    /// generators `0..n_gens`, letter coefficients of degree ≤ `max_coeff_degree`.
    pub fn random(
        rng: &mut SampleRng,
        nvars: usize,
        n_gens: usize,
        max_len: usize,
        max_coeff_degree: u32,
        max_terms: usize,
    ) -> TensorElement {
        let monos = Monomial::all_up_to(nvars, max_coeff_degree);
        let mut out = Self::zero(nvars);
        let nterms = rng.gen_range(1..=max_terms);
        for _ in 0..nterms {
            let len = rng.gen_range(0..=max_len);
            let w: Word = (0..len)
                .map(|_| Letter { coeff: monos[rng.gen_range(0..monos.len())].clone(), gen: rng.gen_range(0..n_gens) })
                .collect();
            let c = Rational::from_integer(rng.gen_range(-3i64..=3).into());
            out.add_word(w, c);
        }
        out
    }
}

fn fmt_letter(l: &Letter) -> String {
    if l.coeff.is_one() {
        gen_name(l.gen)
    } else {
        format!("({})*{}", l.coeff, gen_name(l.gen))
    }
}

pub fn fmt_word(w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter().map(fmt_letter).collect::<Vec<_>>().join(" ⊗ ")
    }
}

impl fmt::Display for TensorElement {
    /// Words in decreasing order, e.g. `u1 ⊗ u2 - 3 * (x1)*D`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Word, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
        for (k, (w, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let cs = if abs.is_integer() { abs.numer().to_string() } else { format!("{}/{}", abs.numer(), abs.denom()) };
            if abs.is_one() {
                write!(f, "{}", fmt_word(w))?;
            } else if w.is_empty() {
                write!(f, "{}", cs)?;
            } else {
                write!(f, "{} * {}", cs, fmt_word(w))?;
            }
        }
        Ok(())
    }
}

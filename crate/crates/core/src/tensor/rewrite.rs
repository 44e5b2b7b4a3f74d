use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{fmt_word, Letter, TensorElement, Word};
use crate::connection::Connection;
use crate::diffop::DiffOperator;
use crate::dlie::DLieAlgebra;
use crate::error::{Error, Result};
use crate::lie_rinehart::{BracketStructure, ScalarCochain};
use crate::poly::{Monomial, Poly, PolyMatrix, Rational};

/// Which quotient of the tensor algebra to reduce in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QuotientKind {
    /// Modulo `J₁`: coefficients move right through the D-Lie right action.
    UTensor,
    /// Modulo `J₂`: coefficients move right through the anchor.
    URho,
    /// `UTensor` modulo the commutator ideal as well.
    UTensorTilde,
    /// `URho` modulo the commutator ideal as well.
    URhoTilde,
}

impl QuotientKind {
    pub const ALL: [QuotientKind; 4] =
        [QuotientKind::UTensor, QuotientKind::URho, QuotientKind::UTensorTilde, QuotientKind::URhoTilde];

    pub fn is_tilde(self) -> bool {
        matches!(self, QuotientKind::UTensorTilde | QuotientKind::URhoTilde)
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "utensor" => Some(QuotientKind::UTensor),
            "urho" => Some(QuotientKind::URho),
            "utensor-tilde" => Some(QuotientKind::UTensorTilde),
            "urho-tilde" => Some(QuotientKind::URhoTilde),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QuotientKind::UTensor => "utensor",
            QuotientKind::URho => "urho",
            QuotientKind::UTensorTilde => "utensor-tilde",
            QuotientKind::URhoTilde => "urho-tilde",
        }
    }
}

/// Which redex to contract first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteConfig {
    pub max_steps: usize,
    pub strategy: Strategy,
    /// Drop normal-form words longer than this (truncated-ring semantics).
    pub truncate_degree: Option<usize>,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig { max_steps: 1_000_000, strategy: Strategy::Leftmost, truncate_degree: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub element: TensorElement,
    pub steps: usize,
}

/// Termination measure, compared lexicographically: number of non-`D`
/// letters, inversions among them, number of `D` letters, and the sum of
/// position × coefficient degree.
fn measure(w: &Word) -> (usize, usize, usize, u64) {
    let gens: Vec<usize> = w.iter().filter(|l| l.gen != 0).map(|l| l.gen).collect();
    let mut inv = 0;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if gens[i] > gens[j] {
                inv += 1;
            }
        }
    }
    let weight = w.iter().enumerate().map(|(p, l)| p as u64 * l.coeff.degree() as u64).sum();
    (gens.len(), inv, w.len() - gens.len(), weight)
}

struct Rules<'a> {
    t: &'a DLieAlgebra,
    kind: QuotientKind,
    one: Monomial,
}

impl Rules<'_> {
    /// The derivation transporting coefficients past `uᵢ`.
    fn tau(&self, i: usize, m: &Monomial) -> Poly {
        let p = Poly::monomial(self.t.nvars(), m.clone(), Rational::one());
        match self.kind {
            QuotientKind::UTensor | QuotientKind::UTensorTilde => self.t.right_anchor(i).apply(&p),
            QuotientKind::URho | QuotientKind::URhoTilde => self.t.anchor(i).apply(&p),
        }
    }

    fn applies_at(&self, w: &Word, p: usize) -> bool {
        let (a, b) = (&w[p], &w[p + 1]);
        if a.gen == 0 {
            return true;
        }
        if !b.coeff.is_one() || b.gen == 0 {
            return true;
        }
        self.kind.is_tilde() && a.gen > b.gen
    }

    /// Position of the redex, or `None` when `w` is in normal form. A
    /// single-letter word `D` is reported at position `usize::MAX`.
    fn find(&self, w: &Word, strategy: Strategy) -> Option<usize> {
        if w.len() == 1 && w[0].gen == 0 && w[0].coeff.is_one() {
            return Some(usize::MAX);
        }
        if w.len() < 2 {
            return None;
        }
        match strategy {
            Strategy::Leftmost => (0..w.len() - 1).find(|&p| self.applies_at(w, p)),
            Strategy::Rightmost => (0..w.len() - 1).rev().find(|&p| self.applies_at(w, p)),
        }
    }

    /// Contracts the redex at `p`, pushing the resulting words (with
    /// coefficient multipliers) into `out`.
    fn contract(&self, w: &Word, p: usize, out: &mut Vec<(Word, Rational)>) {
        if p == usize::MAX {
            out.push((Vec::new(), Rational::one()));
            return;
        }
        let splice = |mid: Vec<Letter>| -> Word {
            let mut v = w[..p].to_vec();
            v.extend(mid);
            v.extend(w[p + 2..].iter().cloned());
            v
        };
        let (a, b) = (&w[p], &w[p + 1]);
        let one = || Letter { coeff: self.one.clone(), gen: b.gen };
        if a.gen == 0 {
            // (m'D)(mX) = (m'm)X
            out.push((splice(vec![Letter { coeff: a.coeff.mul(&b.coeff), gen: b.gen }]), Rational::one()));
            return;
        }
        let i = a.gen;
        if !b.coeff.is_one() || b.gen == 0 {
            // uᵢ ⊗ (mX) = (m uᵢ) ⊗ X + τᵢ(m) X
            let lead = Letter { coeff: a.coeff.mul(&b.coeff), gen: i };
            if b.gen == 0 {
                out.push((splice(vec![lead]), Rational::one()));
            } else {
                out.push((splice(vec![lead, one()]), Rational::one()));
            }
            for (t, c) in self.tau(i, &b.coeff).terms() {
                let d = Letter { coeff: a.coeff.mul(t), gen: 0 };
                if b.gen == 0 {
                    out.push((splice(vec![d]), c.clone()));
                } else {
                    out.push((splice(vec![d, one()]), c.clone()));
                }
            }
            return;
        }
        // (m uᵢ) ⊗ uⱼ = uⱼ ⊗ (m uᵢ) + m[uᵢ,uⱼ] − π̃(uⱼ)(m) uᵢ, for i > j
        let j = b.gen;
        let m = &a.coeff;
        out.push((splice(vec![Letter { coeff: self.one.clone(), gen: j }, Letter { coeff: m.clone(), gen: i }]), Rational::one()));
        for (k, c) in self.t.structure(i, j).support() {
            for (t, q) in c.terms() {
                out.push((splice(vec![Letter { coeff: m.mul(t), gen: k }]), q.clone()));
            }
        }
        let mp = Poly::monomial(self.t.nvars(), m.clone(), Rational::one());
        for (t, q) in self.t.anchor(j).apply(&mp).terms() {
            out.push((splice(vec![Letter { coeff: t.clone(), gen: i }]), -q.clone()));
        }
    }
}

/// Reduces `el` to normal form in the quotient `kind` of `T*_k(L̃)`.
pub fn normal_form(el: &TensorElement, t: &DLieAlgebra, kind: QuotientKind, cfg: RewriteConfig) -> Result<NormalForm> {
    let rules = Rules { t, kind, one: Monomial::one(t.nvars()) };
    let mut pending: BTreeMap<Word, Rational> = el.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
    let mut done = TensorElement::zero(el.nvars());
    let mut steps = 0usize;
    let mut scratch = Vec::new();
    while let Some((w, c)) = pending.pop_last() {
        match rules.find(&w, cfg.strategy) {
            None => done.add_word(w, c),
            Some(p) => {
                steps += 1;
                if steps > cfg.max_steps {
                    return Err(Error::StepBudgetExceeded(cfg.max_steps));
                }
                scratch.clear();
                rules.contract(&w, p, &mut scratch);
                for (nw, q) in scratch.drain(..) {
                    debug_assert!(measure(&nw) < measure(&w), "rewrite step did not decrease the measure: {} -> {}", fmt_word(&w), fmt_word(&nw));
                    let e = pending.entry(nw).or_insert_with(Rational::zero);
                    *e += &c * q;
                }
                pending.retain(|_, v| !v.is_zero());
            }
        }
    }
    if let Some(d) = cfg.truncate_degree {
        let mut cut = TensorElement::zero(el.nvars());
        for (w, c) in done.terms() {
            if w.len() <= d {
                cut.add_word(w.clone(), c.clone());
            }
        }
        done = cut;
    }
    Ok(NormalForm { element: done, steps })
}

/// Word length of the normal form; `None` for zero.
pub fn filtration_degree(el: &TensorElement, t: &DLieAlgebra, kind: QuotientKind, cfg: RewriteConfig) -> Result<Option<usize>> {
    Ok(normal_form(el, t, kind, cfg)?.element.degree())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostCommReport {
    pub deg_x: Option<usize>,
    pub deg_y: Option<usize>,
    pub commutator: TensorElement,
    pub deg_commutator: Option<usize>,
    pub holds: bool,
}

/// Checks that `[x,y]` has filtration degree at most `deg x + deg y − 1`.
pub fn almost_comm_witness(
    x: &TensorElement,
    y: &TensorElement,
    t: &DLieAlgebra,
    kind: QuotientKind,
    cfg: RewriteConfig,
) -> Result<AlmostCommReport> {
    if !kind.is_tilde() {
        return Err(Error::Precondition("almost commutativity is checked in the tilde quotients".into()));
    }
    let deg_x = filtration_degree(x, t, kind, cfg)?;
    let deg_y = filtration_degree(y, t, kind, cfg)?;
    let nf = normal_form(&x.commutator(y), t, kind, cfg)?.element;
    let deg_c = nf.degree();
    let holds = match (deg_x, deg_y, deg_c) {
        (_, _, None) => true,
        (Some(i), Some(j), Some(c)) => c < i + j,
        _ => false,
    };
    Ok(AlmostCommReport { deg_x, deg_y, commutator: nf, deg_commutator: deg_c, holds })
}

/// Ring-homomorphism evaluation through a connection: letters `m·g` go to
/// `m·ρ(g)`, words to compositions, the empty word to `Id`.
pub fn evaluate(el: &TensorElement, rho: &Connection) -> DiffOperator {
    let r = rho.rank();
    let m = rho.nvars();
    let gens: Vec<DiffOperator> = (0..rho.algebra().rank()).map(|i| rho.generator_operator(i)).collect();
    let mut acc = DiffOperator::zero(r, r, m);
    for (w, c) in el.terms() {
        let mut op = DiffOperator::identity(r, m);
        for l in w {
            let coeff = PolyMatrix::scalar(r, &Poly::monomial(m, l.coeff.clone(), Rational::one()));
            op = op.compose(&gens[l.gen].left_mul_matrix(&coeff));
        }
        acc = &acc + &op.left_mul_matrix(&PolyMatrix::scalar(r, &Poly::constant(m, c.clone())));
    }
    acc
}

/// Generators `uᵢ⊗uⱼ − uⱼ⊗uᵢ − [uᵢ,uⱼ] − f̃(uᵢ,uⱼ)D` of `I(f)` for
/// `1 ≤ i < j ≤ n`, with `f` a cochain on the non-central generators.
pub fn ideal_generators(t: &DLieAlgebra, f: &ScalarCochain) -> Vec<((usize, usize), TensorElement)> {
    let m = t.nvars();
    let n = t.n();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let ui = TensorElement::generator(m, i);
            let uj = TensorElement::generator(m, j);
            let br = TensorElement::from_combination(&t.bracket(&t.basis(i), &t.basis(j)));
            let fd = TensorElement::scalar(&f.get(&[i - 1, j - 1]));
            out.push(((i, j), ui.commutator(&uj).sub(&br).sub(&fd)));
        }
    }
    out
}

/// `None` when every generator evaluates to zero, else the first offending
/// generator pair.
pub fn ideal_annihilation_witness(rho: &Connection, gens: &[((usize, usize), TensorElement)]) -> Option<String> {
    gens.iter().find_map(|((i, j), g)| {
        let v = evaluate(g, rho);
        (!v.is_zero()).then(|| format!("generator for (u{}, u{}) evaluates to {}", i, j, v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_rinehart::LieRinehartPresentation;
    use crate::poly::parse_poly;
    use crate::tensor::parse_tensor;

    fn ext(c: &str) -> DLieAlgebra {
        let mut f = ScalarCochain::zero(2, 2, 2);
        f.set(&[0, 1], parse_poly(c, 2).unwrap());
        DLieAlgebra::build_extension(&LieRinehartPresentation::derivations(2), &f).unwrap()
    }

    fn nf(t: &DLieAlgebra, s: &str, kind: QuotientKind) -> TensorElement {
        normal_form(&parse_tensor(s, t.rank(), 2).unwrap(), t, kind, RewriteConfig::default()).unwrap().element
    }

    #[test]
    fn d_is_one() {
        let t = ext("0");
        for k in QuotientKind::ALL {
            assert_eq!(nf(&t, "D", k), TensorElement::one(2));
            assert_eq!(nf(&t, "D ⊗ u1 ⊗ D", k), nf(&t, "u1", k));
        }
    }

    #[test]
    fn coefficient_stays_left() {
        let t = ext("0");
        assert_eq!(nf(&t, "(x + y)*u1", QuotientKind::UTensor), parse_tensor("(x)*u1 + (y)*u1", 3, 2).unwrap());
        // ∂x ⊗ x = x ∂x + 1
        assert_eq!(nf(&t, "u1 ⊗ (x)", QuotientKind::UTensor), parse_tensor("(x)*u1 + 1", 3, 2).unwrap());
    }

    #[test]
    fn constant_cocycle_reorder() {
        // [u2,u1] = −c z, so u2 ⊗ u1 = u1 ⊗ u2 − c
        let t = ext("5");
        assert_eq!(nf(&t, "u2 ⊗ u1", QuotientKind::UTensorTilde), parse_tensor("u1 ⊗ u2 - 5", 3, 2).unwrap());
        let c = parse_tensor("u1 ⊗ u2 - u2 ⊗ u1", 3, 2).unwrap();
        assert_eq!(filtration_degree(&c, &t, QuotientKind::UTensorTilde, RewriteConfig::default()).unwrap(), Some(0));
    }

    #[test]
    fn budget_is_reported() {
        let t = ext("x");
        let el = parse_tensor("u2 ⊗ u2 ⊗ u1 ⊗ u1 ⊗ (x^2*y)", 3, 2).unwrap();
        let cfg = RewriteConfig { max_steps: 3, ..Default::default() };
        assert_eq!(normal_form(&el, &t, QuotientKind::URhoTilde, cfg), Err(Error::StepBudgetExceeded(3)));
    }
}

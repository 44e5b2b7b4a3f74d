//! Sampled checks over the quotient rings: idempotence and confluence of
//! the rewriting, evaluation invariance and almost commutativity.

use super::rewrite::{almost_comm_witness, evaluate, normal_form, QuotientKind, RewriteConfig, Strategy};
use super::TensorElement;
use crate::connection::Connection;
use crate::dlie::DLieAlgebra;
use crate::lie_rinehart::BracketStructure;
use crate::report::CheckReport;
use crate::sample;

/// How random tensor elements are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorSample {
    pub seed: u64,
    pub samples: usize,
    /// Maximal word length.
    pub max_len: usize,
    pub coeff_degree: u32,
    pub max_terms: usize,
}

impl Default for TensorSample {
    fn default() -> Self {
        TensorSample { seed: 0, samples: 100, max_len: 4, coeff_degree: 1, max_terms: 3 }
    }
}

impl TensorSample {
    fn draw(&self, rng: &mut sample::SampleRng, t: &DLieAlgebra) -> TensorElement {
        TensorElement::random(rng, t.nvars(), t.rank(), self.max_len, self.coeff_degree, self.max_terms)
    }
}

/// Termination within the step budget, idempotence, and agreement of the
/// leftmost and rightmost strategies.
pub fn normal_form_check(t: &DLieAlgebra, kind: QuotientKind, s: TensorSample, cfg: RewriteConfig) -> CheckReport {
    let mut rep = CheckReport::new(format!("normal_form/{}", kind.name()), Some(s.seed));
    let mut rng = sample::rng(s.seed);
    let (mut term, mut idem, mut confl) = (None, None, None);
    let left = RewriteConfig { strategy: Strategy::Leftmost, ..cfg };
    let right = RewriteConfig { strategy: Strategy::Rightmost, ..cfg };
    for k in 0..s.samples {
        let el = s.draw(&mut rng, t);
        let nf = match normal_form(&el, t, kind, left) {
            Ok(nf) => nf.element,
            Err(e) => {
                term = term.or_else(|| Some(format!("sample {k}: {e} for {el}")));
                continue;
            }
        };
        match normal_form(&nf, t, kind, left) {
            Ok(again) if again.element == nf && again.steps == 0 => {}
            Ok(again) => idem = idem.or_else(|| Some(format!("sample {k}: NF({nf}) = {} after {} steps", again.element, again.steps))),
            Err(e) => term = term.or_else(|| Some(format!("sample {k}: {e}"))),
        }
        match normal_form(&el, t, kind, right) {
            Ok(r) if r.element == nf => {}
            Ok(r) => confl = confl.or_else(|| Some(format!("sample {k}: {el} has normal forms {nf} and {}", r.element))),
            Err(e) => term = term.or_else(|| Some(format!("sample {k}: {e}"))),
        }
    }
    rep.record("terminates", term);
    rep.record("idempotent", idem);
    rep.record("strategies_agree", confl);
    rep
}

/// `evaluate(NF(el)) = evaluate(el)` through `ρ`.
pub fn evaluation_check(rho: &Connection, kind: QuotientKind, s: TensorSample, cfg: RewriteConfig) -> CheckReport {
    let mut rep = CheckReport::new(format!("evaluation/{}", kind.name()), Some(s.seed));
    let t = rho.algebra();
    let mut rng = sample::rng(s.seed);
    let mut w = None;
    for k in 0..s.samples {
        let el = s.draw(&mut rng, t);
        match normal_form(&el, t, kind, cfg) {
            Ok(nf) if evaluate(&nf.element, rho) == evaluate(&el, rho) => {}
            Ok(nf) => w = w.or_else(|| Some(format!("sample {k}: {el} and its normal form {} act differently", nf.element))),
            Err(e) => w = w.or_else(|| Some(format!("sample {k}: {e}"))),
        }
    }
    rep.record("invariant", w);
    rep
}

/// `deg [x,y] ≤ deg x + deg y − 1` on sampled pairs.
pub fn almost_comm_check(t: &DLieAlgebra, kind: QuotientKind, s: TensorSample, cfg: RewriteConfig) -> CheckReport {
    let mut rep = CheckReport::new(format!("almost_commutative/{}", kind.name()), Some(s.seed));
    if !kind.is_tilde() {
        rep.not_applicable("commutator_degree", "only the tilde quotients are almost commutative");
        return rep;
    }
    let mut rng = sample::rng(s.seed);
    let mut w = None;
    for k in 0..s.samples {
        let x = s.draw(&mut rng, t);
        let y = s.draw(&mut rng, t);
        match almost_comm_witness(&x, &y, t, kind, cfg) {
            Ok(r) if r.holds => {}
            Ok(r) => {
                w = w.or_else(|| {
                    Some(format!(
                        "sample {k}: deg x = {:?}, deg y = {:?}, [x,y] = {} of degree {:?}",
                        r.deg_x, r.deg_y, r.commutator, r.deg_commutator
                    ))
                })
            }
            Err(e) => w = w.or_else(|| Some(format!("sample {k}: {e}"))),
        }
    }
    rep.record("commutator_degree", w);
    rep
}

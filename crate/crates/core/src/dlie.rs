//! D-Lie algebras presented by generators `D = u₀, u₁..uₙ`, the model
//! `D¹_f(A)`, the abelian extension `L(α*f)` and morphisms between them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lie_rinehart::{BracketStructure, Combination, LieRinehartPresentation, SampleConfig, ScalarCochain};
use crate::poly::{Derivation, Poly};
use crate::report::CheckReport;
use crate::sample;

/// Printed name of generator `i`: `D` for 0, `u{i}` otherwise.
pub fn gen_name(i: usize) -> String {
    if i == 0 {
        "D".into()
    } else {
        format!("u{i}")
    }
}

pub fn fmt_comb(c: &Combination) -> String {
    c.fmt_with(gen_name)
}

/// An element `aI + x` of `D¹_f(A) = A ⊕ Der(A)`.
pub type D1Element = (Poly, Derivation);

fn der_as_comb(d: &Derivation) -> Combination {
    Combination(d.coeffs().to_vec())
}

/// Bracket of `D¹_f(A)`: `[(a,x),(b,y)] = (x(b) − y(a) + f(x,y), [x,y])`.
pub fn d1f_bracket(u: &D1Element, v: &D1Element, f: &ScalarCochain) -> D1Element {
    let (a, x) = u;
    let (b, y) = v;
    let fx = f.eval(&[der_as_comb(x), der_as_comb(y)]);
    (&(&x.apply(b) - &y.apply(a)) + &fx, x.bracket(y))
}

/// Right action on `D¹_f(A)`: `(a,x)c = (ca + x(c), cx)`.
pub fn d1f_right_action(u: &D1Element, c: &Poly) -> D1Element {
    (&(c * &u.0) + &u.1.apply(c), u.1.scale(c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DLieAlgebra {
    nvars: usize,
    anchors: Vec<Derivation>,
    right_anchors: Vec<Derivation>,
    structure: Vec<Vec<Combination>>,
    cocycle: Option<ScalarCochain>,
    der_cocycle: Option<ScalarCochain>,
    alpha: Option<Vec<D1Element>>,
    base: Option<LieRinehartPresentation>,
}

impl DLieAlgebra {
    /// Hand-built algebra on `n+1` generators, `anchors[0]` being `π̃(D)`.
    /// Brackets are given for `i < j` and filled in antisymmetrically. The
    /// right action defaults to `uc = cu + π̃(u)(c)D`.
    pub fn from_parts(nvars: usize, anchors: Vec<Derivation>, brackets: BTreeMap<(usize, usize), Combination>) -> Self {
        let n = anchors.len();
        let mut structure = vec![vec![Combination::zero(n, nvars); n]; n];
        for ((i, j), c) in brackets {
            assert!(i < n && j < n && i != j, "bracket index out of range");
            structure[j][i] = -&c;
            structure[i][j] = c;
        }
        Self::from_table(nvars, anchors, structure)
    }

    /// Raw structure table, antisymmetry unchecked.
    pub fn from_table(nvars: usize, anchors: Vec<Derivation>, structure: Vec<Vec<Combination>>) -> Self {
        DLieAlgebra {
            nvars,
            right_anchors: anchors.clone(),
            anchors,
            structure,
            cocycle: None,
            der_cocycle: None,
            alpha: None,
            base: None,
        }
    }

    /// Overrides the right action: `uc = cu + σ(u)(c)D`.
    pub fn with_right_anchor(mut self, sigma: Vec<Derivation>) -> Self {
        assert_eq!(sigma.len(), self.anchors.len());
        self.right_anchors = sigma;
        self
    }

    /// Records a map `α̃` into `D¹_f(A)` for the given cocycle on `Der(A)`.
    pub fn with_alpha(mut self, alpha: Vec<D1Element>, f: ScalarCochain) -> Self {
        assert_eq!(alpha.len(), self.anchors.len());
        self.alpha = Some(alpha);
        self.der_cocycle = Some(f);
        self
    }

    /// The model `D¹_f(A)` on generators `D = (1,0)` and `uᵢ = (0,∂ᵢ)`.
    pub fn d1f(f: &ScalarCochain) -> Result<Self> {
        Self::build_extension(&LieRinehartPresentation::derivations(f.nvars()), f)
    }

    /// The extension `L(α*f)`. Requires `f` to be a 2-cocycle on `Der(A)`.
    pub fn build_extension(l: &LieRinehartPresentation, f: &ScalarCochain) -> Result<Self> {
        let der = LieRinehartPresentation::derivations(l.nvars());
        if f.degree() != 2 || f.rank() != l.nvars() {
            return Err(Error::Precondition("f must be a 2-cochain on Der(A)".into()));
        }
        if let Some(w) = f.cocycle_witness(&der) {
            return Err(Error::NotCocycle { witness: w });
        }
        let g = f.pullback(l);
        let mut t = Self::build_extension_with(l, &g)?;
        let m = l.nvars();
        let mut alpha = vec![(Poly::one(m), Derivation::zero(m))];
        alpha.extend(l.anchors().iter().map(|d| (Poly::zero(m), d.clone())));
        t.alpha = Some(alpha);
        t.der_cocycle = Some(f.clone());
        Ok(t)
    }

    /// The extension `A z ⊕ L` twisted by a 2-cocycle `g` given directly on
    /// `L`. No map into `D¹_f(A)` is recorded.
    pub fn build_extension_with(l: &LieRinehartPresentation, g: &ScalarCochain) -> Result<Self> {
        let n = l.rank();
        let m = l.nvars();
        if g.degree() != 2 || g.rank() != n {
            return Err(Error::Precondition("cocycle must be a 2-cochain on L".into()));
        }
        if let Some(w) = g.cocycle_witness(l) {
            return Err(Error::NotCocycle { witness: w });
        }
        let shift = |c: &Combination| {
            let mut v = vec![Poly::zero(m)];
            v.extend(c.0.iter().cloned());
            Combination(v)
        };
        let mut structure = vec![vec![Combination::zero(n + 1, m); n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                let mut c = shift(l.structure(i, j));
                c.0[0] = g.get(&[i, j]);
                structure[i + 1][j + 1] = c;
            }
        }
        let mut anchors = vec![Derivation::zero(m)];
        anchors.extend(l.anchors().iter().cloned());
        let mut t = Self::from_table(m, anchors, structure);
        t.cocycle = Some(g.clone());
        t.base = Some(l.clone());
        Ok(t)
    }

    /// Number of non-central generators `n`.
    pub fn n(&self) -> usize {
        self.anchors.len() - 1
    }

    pub fn anchors(&self) -> &[Derivation] {
        &self.anchors
    }

    /// `σ(uᵢ)`, the derivation in `uᵢc = cuᵢ + σ(uᵢ)(c)D`.
    pub fn right_anchor(&self, i: usize) -> &Derivation {
        &self.right_anchors[i]
    }

    /// The cocycle on `L` the algebra was built from.
    pub fn cocycle(&self) -> Option<&ScalarCochain> {
        self.cocycle.as_ref()
    }

    /// The cocycle on `Der(A)` defining the target of `α̃`.
    pub fn der_cocycle(&self) -> Option<&ScalarCochain> {
        self.der_cocycle.as_ref()
    }

    pub fn alpha(&self) -> Option<&[D1Element]> {
        self.alpha.as_deref()
    }

    pub fn base(&self) -> Option<&LieRinehartPresentation> {
        self.base.as_ref()
    }

    pub fn d(&self) -> Combination {
        self.basis(0)
    }

    /// Right action `uc = cu + σ(u)(c)D`, extended left-linearly.
    pub fn right_mul(&self, u: &Combination, c: &Poly) -> Combination {
        let mut out = u.scale(c);
        for (i, a) in u.support() {
            let s = self.right_anchors[i].apply(c);
            if !s.is_zero() {
                out.0[0] += &(a * &s);
            }
        }
        out
    }

    /// `α̃` extended left-linearly.
    pub fn alpha_of(&self, u: &Combination) -> Option<D1Element> {
        let alpha = self.alpha.as_ref()?;
        let mut s = Poly::zero(self.nvars);
        let mut d = Derivation::zero(self.nvars);
        for (i, a) in u.support() {
            s += &(a * &alpha[i].0);
            d = &d + &alpha[i].1.scale(a);
        }
        Some((s, d))
    }

    /// Embeds an element of the base algebra `L` as `0·z + x`.
    pub fn lift(&self, x: &Combination) -> Combination {
        let mut v = vec![Poly::zero(self.nvars)];
        v.extend(x.0.iter().cloned());
        Combination(v)
    }

    /// Splits `az + x` into `(a, x)`.
    pub fn split(&self, u: &Combination) -> (Poly, Combination) {
        (u.0[0].clone(), Combination(u.0[1..].to_vec()))
    }

    pub fn random_element(&self, rng: &mut sample::SampleRng, max_degree: u32) -> Combination {
        self.random_combination(rng, max_degree)
    }

    /// The D-Lie axiom suite on generators plus seeded samples.
    pub fn check_axioms(&self, cfg: SampleConfig) -> CheckReport {
        let mut rep = CheckReport::new("dlie", Some(cfg.seed));
        let n1 = self.rank();
        let m = self.nvars;
        let gens: Vec<Combination> = (0..n1).map(|i| self.basis(i)).collect();
        let mut rng = sample::rng(cfg.seed);
        let samples: Vec<(Combination, Combination, Combination, Poly, Poly)> = (0..cfg.samples)
            .map(|_| {
                (
                    self.random_combination(&mut rng, cfg.max_degree),
                    self.random_combination(&mut rng, cfg.max_degree),
                    self.random_combination(&mut rng, cfg.max_degree),
                    sample::poly(&mut rng, m, cfg.max_degree, 3),
                    sample::poly(&mut rng, m, cfg.max_degree, 3),
                )
            })
            .collect();
        let coord_scalars: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).chain([Poly::var(m, 0).pow(2)].into_iter().filter(|_| m > 0)).collect();
        let d = self.d();

        // centrality of D
        let mut w = None;
        for (i, g) in gens.iter().enumerate() {
            if !self.bracket(&d, g).is_zero() {
                w = w.or_else(|| Some(format!("[D, {}] = {}", gen_name(i), fmt_comb(&self.bracket(&d, g)))));
            }
        }
        for (u, ..) in &samples {
            let b = self.bracket(&d, u);
            if !b.is_zero() {
                w = w.or_else(|| Some(format!("[D, {}] = {}", fmt_comb(u), fmt_comb(&b))));
            }
        }
        rep.record("d_central", w);

        rep.record(
            "anchor_of_d_zero",
            (!self.anchors[0].is_zero()).then(|| format!("anchor(D) = {}", self.anchors[0])),
        );

        let mut w = None;
        for i in 0..n1 {
            for j in 0..n1 {
                let s = self.structure(i, j) + self.structure(j, i);
                if !s.is_zero() || (i == j && !self.structure(i, i).is_zero()) {
                    w = w.or_else(|| Some(format!("[{}, {}] not antisymmetric", gen_name(i), gen_name(j))));
                }
            }
        }
        rep.record("antisymmetry", w);

        // al1: uc = cu + π̃(u)(c)D
        let al1 = |u: &Combination, c: &Poly| {
            let lhs = self.right_mul(u, c);
            let mut rhs = u.scale(c);
            rhs.0[0] += &self.anchor_of(u).apply(c);
            (lhs != rhs).then(|| format!("u = {}, c = {}: uc = {}", fmt_comb(u), c, fmt_comb(&lhs)))
        };
        let mut w = None;
        for g in &gens {
            for c in &coord_scalars {
                w = w.or_else(|| al1(g, c));
            }
        }
        for (u, _, _, c, _) in &samples {
            w = w.or_else(|| al1(u, c));
        }
        rep.record("al1_right_action", w);

        let mut w = None;
        for (u, _, _, c, c2) in &samples {
            let lhs = self.right_mul(&self.right_mul(u, c), c2);
            let rhs = self.right_mul(u, &(c * c2));
            if lhs != rhs {
                w = w.or_else(|| Some(format!("u = {}, c = {}, c' = {}", fmt_comb(u), c, c2)));
            }
        }
        rep.record("right_action_associative", w);

        // al3: [u, cv] = c[u,v] + π̃(u)(c)v
        let mut w = None;
        for (u, v, _, c, _) in &samples {
            let lhs = self.bracket(u, &v.scale(c));
            let rhs = &self.bracket(u, v).scale(c) + &v.scale(&self.anchor_of(u).apply(c));
            if lhs != rhs {
                w = w.or_else(|| Some(format!("u = {}, v = {}, c = {}", fmt_comb(u), fmt_comb(v), c)));
            }
        }
        rep.record("al3_left_leibniz", w);

        // [u, vc] = c[u,v] + π̃(u)(c)v + π̃(u)π̃(v)(c)D
        let right_leibniz = |u: &Combination, v: &Combination, c: &Poly| {
            let lhs = self.bracket(u, &self.right_mul(v, c));
            let pu = self.anchor_of(u);
            let mut rhs = &self.bracket(u, v).scale(c) + &v.scale(&pu.apply(c));
            rhs.0[0] += &pu.apply(&self.anchor_of(v).apply(c));
            (lhs != rhs).then(|| format!("u = {}, v = {}, c = {}: {} vs {}", fmt_comb(u), fmt_comb(v), c, fmt_comb(&lhs), fmt_comb(&rhs)))
        };
        let mut w = None;
        for u in &gens {
            for v in &gens {
                for c in &coord_scalars {
                    w = w.or_else(|| right_leibniz(u, v, c));
                }
            }
        }
        for (u, v, _, c, _) in &samples {
            w = w.or_else(|| right_leibniz(u, v, c));
        }
        rep.record("right_leibniz", w);

        let jac = |u: &Combination, v: &Combination, t: &Combination| {
            let j = self.jacobiator(u, v, t);
            (!j.is_zero()).then(|| format!("({}, {}, {}): jacobiator {}", fmt_comb(u), fmt_comb(v), fmt_comb(t), fmt_comb(&j)))
        };
        let mut w = None;
        for i in 0..n1 {
            for j in i + 1..n1 {
                for k in j + 1..n1 {
                    w = w.or_else(|| jac(&gens[i], &gens[j], &gens[k]));
                }
            }
        }
        rep.record("jacobi_generators", w);
        let mut w = None;
        for (u, v, t, ..) in &samples {
            w = w.or_else(|| jac(u, v, t));
        }
        rep.record("jacobi_samples", w);

        let hom = |u: &Combination, v: &Combination| {
            let lhs = self.anchor_of(&self.bracket(u, v));
            let rhs = self.anchor_of(u).bracket(&self.anchor_of(v));
            (lhs != rhs).then(|| format!("u = {}, v = {}", fmt_comb(u), fmt_comb(v)))
        };
        let mut w = None;
        for u in &gens {
            for v in &gens {
                w = w.or_else(|| hom(u, v));
            }
        }
        for (u, v, ..) in &samples {
            w = w.or_else(|| hom(u, v));
        }
        rep.record("anchor_homomorphism", w);

        match (&self.alpha, &self.der_cocycle) {
            (Some(alpha), Some(f)) => {
                let mut w = None;
                for (i, (_, x)) in alpha.iter().enumerate() {
                    if *x != self.anchors[i] {
                        w = w.or_else(|| Some(format!("pi(alpha({})) = {} but anchor is {}", gen_name(i), x, self.anchors[i])));
                    }
                }
                rep.record("alpha_over_anchor", w);

                let ahom = |u: &Combination, v: &Combination| {
                    let lhs = self.alpha_of(&self.bracket(u, v)).unwrap();
                    let rhs = d1f_bracket(&self.alpha_of(u).unwrap(), &self.alpha_of(v).unwrap(), f);
                    (lhs != rhs).then(|| format!("u = {}, v = {}: ({}, {}) vs ({}, {})", fmt_comb(u), fmt_comb(v), lhs.0, lhs.1, rhs.0, rhs.1))
                };
                let mut w = None;
                for u in &gens {
                    for v in &gens {
                        w = w.or_else(|| ahom(u, v));
                    }
                }
                for (u, v, ..) in &samples {
                    w = w.or_else(|| ahom(u, v));
                }
                rep.record("alpha_bracket_homomorphism", w);

                let mut w = None;
                for (u, _, _, c, _) in &samples {
                    let lhs = self.alpha_of(&self.right_mul(u, c)).unwrap();
                    let rhs = d1f_right_action(&self.alpha_of(u).unwrap(), c);
                    if lhs != rhs {
                        w = w.or_else(|| Some(format!("u = {}, c = {}", fmt_comb(u), c)));
                    }
                }
                rep.record("alpha_right_linear", w);
            }
            _ => {
                for name in ["alpha_over_anchor", "alpha_bracket_homomorphism", "alpha_right_linear"] {
                    rep.not_applicable(name, "no map into D1_f(A) recorded (pre-D-Lie algebra)");
                }
            }
        }
        rep
    }
}

impl BracketStructure for DLieAlgebra {
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

/// A map of D-Lie algebras, given by the images of the source generators.
#[derive(Clone, Debug, PartialEq)]
pub struct DLieMorphism {
    pub images: Vec<Combination>,
}

impl DLieMorphism {
    pub fn identity(t: &DLieAlgebra) -> Self {
        DLieMorphism { images: (0..t.rank()).map(|i| t.basis(i)).collect() }
    }

    /// `φ_f(az + x) = az + φ(x)` for a Lie-Rinehart map `φ` given by images
    /// of the source generators in the target generators.
    pub fn from_lie_rinehart(images: &[Combination]) -> Self {
        let m = images.first().map(|c| c.coeff(0).nvars()).unwrap_or(0);
        let r = images.first().map(|c| c.rank()).unwrap_or(0);
        let mut out = vec![Combination::basis(r + 1, m, 0)];
        for c in images {
            let mut v = vec![Poly::zero(m)];
            v.extend(c.0.iter().cloned());
            out.push(Combination(v));
        }
        DLieMorphism { images: out }
    }

    /// `az + x ↦ (a + g(x))z + x`, a morphism `L(h + dg) → L(h)` for a
    /// 1-cochain `g` on `L`.
    pub fn cohomologous(g: &ScalarCochain) -> Self {
        let n = g.rank();
        let m = g.nvars();
        let mut out = vec![Combination::basis(n + 1, m, 0)];
        for i in 0..n {
            let mut c = Combination::basis(n + 1, m, i + 1);
            c.0[0] = g.get(&[i]);
            out.push(c);
        }
        DLieMorphism { images: out }
    }

    pub fn apply(&self, u: &Combination) -> Combination {
        assert_eq!(u.rank(), self.images.len(), "element does not live in the source");
        let mut acc = Combination::zero(self.images[0].rank(), u.coeff(0).nvars());
        for (i, a) in u.support() {
            acc = &acc + &self.images[i].scale(a);
        }
        acc
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &DLieMorphism) -> DLieMorphism {
        DLieMorphism { images: self.images.iter().map(|c| after.apply(c)).collect() }
    }

    /// Checks `φ(D) = D'`, bracket preservation, right-action compatibility
    /// and anchor compatibility. Anchors are compared through `π`.
    pub fn check(&self, source: &DLieAlgebra, target: &DLieAlgebra, cfg: SampleConfig) -> CheckReport {
        let mut rep = CheckReport::new("morphism", Some(cfg.seed));
        if self.images.len() != source.rank() || self.images.iter().any(|c| c.rank() != target.rank()) {
            rep.fail("shape", "generator images do not match source/target ranks");
            return rep;
        }
        rep.record(
            "maps_d_to_d",
            (self.images[0] != target.d()).then(|| format!("phi(D) = {}", fmt_comb(&self.images[0]))),
        );

        let gens: Vec<Combination> = (0..source.rank()).map(|i| source.basis(i)).collect();
        let mut rng = sample::rng(cfg.seed);
        let samples: Vec<(Combination, Combination, Poly)> = (0..cfg.samples)
            .map(|_| {
                (
                    source.random_combination(&mut rng, cfg.max_degree),
                    source.random_combination(&mut rng, cfg.max_degree),
                    sample::poly(&mut rng, source.nvars(), cfg.max_degree, 3),
                )
            })
            .collect();

        let br = |u: &Combination, v: &Combination| {
            let lhs = self.apply(&source.bracket(u, v));
            let rhs = target.bracket(&self.apply(u), &self.apply(v));
            (lhs != rhs).then(|| format!("u = {}, v = {}: {} vs {}", fmt_comb(u), fmt_comb(v), fmt_comb(&lhs), fmt_comb(&rhs)))
        };
        let mut w = None;
        for u in &gens {
            for v in &gens {
                w = w.or_else(|| br(u, v));
            }
        }
        rep.record("bracket_generators", w);
        let mut w = None;
        for (u, v, _) in &samples {
            w = w.or_else(|| br(u, v));
        }
        rep.record("bracket_samples", w);

        let mut w = None;
        for (u, _, c) in &samples {
            let lhs = self.apply(&source.right_mul(u, c));
            let rhs = target.right_mul(&self.apply(u), c);
            if lhs != rhs {
                w = w.or_else(|| Some(format!("u = {}, c = {}", fmt_comb(u), c)));
            }
        }
        rep.record("right_action", w);

        let mut w = None;
        for (i, g) in gens.iter().enumerate() {
            let lhs = target.anchor_of(&self.apply(g));
            if lhs != *source.anchor(i) {
                w = w.or_else(|| Some(format!("anchor(phi({})) = {} but anchor({}) = {}", gen_name(i), lhs, gen_name(i), source.anchor(i))));
            }
        }
        rep.record("anchor", w);
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, 2).unwrap()
    }

    fn f_const(c: &str) -> ScalarCochain {
        let mut f = ScalarCochain::zero(2, 2, 2);
        f.set(&[0, 1], p(c));
        f
    }

    #[test]
    fn d1f_bracket_values() {
        let dx = Derivation::partial(2, 0);
        let dy = Derivation::partial(2, 1);
        let z = Derivation::zero(2);
        let f0 = ScalarCochain::zero(2, 2, 2);
        let u = (p("0"), dx.clone());
        assert_eq!(d1f_bracket(&u, &u, &f0), (p("0"), z.clone()));
        assert_eq!(d1f_bracket(&u, &(p("x"), z.clone()), &f0), (p("1"), z.clone()));
        let fx = f_const("x");
        assert_eq!(d1f_bracket(&u, &(p("0"), dy), &fx), (p("x"), z));
    }

    #[test]
    fn constant_cocycle_extension() {
        let l = LieRinehartPresentation::derivations(2);
        let t = DLieAlgebra::build_extension(&l, &f_const("1")).unwrap();
        assert_eq!(t.bracket(&t.basis(1), &t.basis(2)), t.d());
        assert!(t.check_axioms(SampleConfig::default()).passed());
    }

    #[test]
    fn rejects_non_cocycle() {
        let l = LieRinehartPresentation::derivations(3);
        let mut f = ScalarCochain::zero(3, 3, 2);
        f.set(&[0, 1], parse_poly("z", 3).unwrap());
        assert!(matches!(DLieAlgebra::build_extension(&l, &f), Err(Error::NotCocycle { .. })));
    }

    #[test]
    fn non_central_d_is_caught() {
        let m = 1;
        let mut br = BTreeMap::new();
        br.insert((0, 1), Combination::basis(2, m, 1));
        let t = DLieAlgebra::from_parts(m, vec![Derivation::zero(m), Derivation::partial(m, 0)], br);
        let rep = t.check_axioms(SampleConfig::default());
        assert!(matches!(rep.outcome("d_central"), Some(crate::Outcome::Fail(_))));
        assert!(matches!(rep.outcome("alpha_bracket_homomorphism"), Some(crate::Outcome::NotApplicable(_))));
    }

    #[test]
    fn identity_morphism() {
        let l = LieRinehartPresentation::derivations(2);
        let t = DLieAlgebra::build_extension(&l, &f_const("x")).unwrap();
        assert!(DLieMorphism::identity(&t).check(&t, &t, SampleConfig::default()).passed());
    }
}

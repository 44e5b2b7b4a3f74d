//! The non-abelian extension `End(L̃,E) = End_A(E) ⊕ L̃` of a connection
//! with `ψ = Id`, and the map `ρ^!(φ,u) = φ + ρ(u)` into `Diff¹(E)`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::connection::Connection;
use crate::diffop::{diff_order, DiffOperator};
use crate::dlie::{fmt_comb, DLieAlgebra};
use crate::error::{Error, Result};
use crate::lie_rinehart::{BracketStructure, Combination, SampleConfig};
use crate::poly::{Derivation, Monomial, Poly, PolyMatrix, Rational};
use crate::report::CheckReport;
use crate::sample;

/// An element `(φ, u)` with `φ ∈ End_A(A^r)` and `u ∈ L̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndExtElement {
    pub phi: PolyMatrix,
    pub u: Combination,
}

impl EndExtElement {
    pub fn is_zero(&self) -> bool {
        self.phi.is_zero() && self.u.is_zero()
    }
}

impl std::fmt::Display for EndExtElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.phi, fmt_comb(&self.u))
    }
}

/// `End(L̃,E)` presented as a D-Lie algebra on `D, u₁..uₙ` followed by the
/// matrix units `E_ab` (row-major).
#[derive(Clone, Debug)]
pub struct EndExtension {
    rho: Connection,
    algebra: DLieAlgebra,
}

fn operator_matrix(op: &DiffOperator, what: &str) -> Result<PolyMatrix> {
    match diff_order(op, 0) {
        Some(0) => Ok(op.as_matrix().expect("order 0")),
        _ => Err(Error::NotALinear(format!("{what} = {op}"))),
    }
}

impl EndExtension {
    pub fn new(rho: &Connection) -> Result<Self> {
        Self::build(rho, false)
    }

    /// Negative control: the curvature term enters with the wrong sign.
    pub fn corrupted(rho: &Connection) -> Result<Self> {
        Self::build(rho, true)
    }

    fn build(rho: &Connection, flip_curvature: bool) -> Result<Self> {
        if !rho.psi_is_identity() {
            return Err(Error::Precondition("End(L~,E) requires psi = Id".into()));
        }
        let t = rho.algebra();
        let r = rho.rank();
        let m = t.nvars();
        let n1 = t.rank();
        let total = n1 + r * r;
        let unit = |a: usize, b: usize| n1 + a * r + b;
        let mut brackets = BTreeMap::new();

        let to_comb = |mat: &PolyMatrix, u: Option<&Combination>| {
            let mut c = Combination::zero(total, m);
            if let Some(u) = u {
                for (i, a) in u.support() {
                    c.0[i] = a.clone();
                }
            }
            for a in 0..r {
                for b in 0..r {
                    c.0[unit(a, b)] = mat.get(a, b).clone();
                }
            }
            c
        };
        let e = |a: usize, b: usize| {
            let mut x = PolyMatrix::zero(r, r, m);
            x.set(a, b, Poly::one(m));
            x
        };

        for i in 1..n1 {
            for j in i + 1..n1 {
                let mut rm = rho.curvature_matrix(&t.basis(i), &t.basis(j))?;
                if flip_curvature {
                    rm = -&rm;
                }
                let br = t.bracket(&t.basis(i), &t.basis(j));
                brackets.insert((i, j), to_comb(&rm, Some(&br)));
            }
            for a in 0..r {
                for b in 0..r {
                    let op = rho.generator_operator(i).commutator(&DiffOperator::from_matrix(&e(a, b)));
                    let mat = operator_matrix(&op, "[rho(u), E]")?;
                    brackets.insert((i, unit(a, b)), to_comb(&mat, None));
                }
            }
        }
        for p in 0..r * r {
            for q in p + 1..r * r {
                let mat = e(p / r, p % r).commutator(&e(q / r, q % r));
                brackets.insert((unit(p / r, p % r), unit(q / r, q % r)), to_comb(&mat, None));
            }
        }
        let mut anchors: Vec<Derivation> = t.anchors().to_vec();
        anchors.resize(total, Derivation::zero(m));
        let algebra = DLieAlgebra::from_parts(m, anchors, brackets);
        Ok(EndExtension { rho: rho.clone(), algebra })
    }

    pub fn algebra(&self) -> &DLieAlgebra {
        &self.algebra
    }

    pub fn connection(&self) -> &Connection {
        &self.rho
    }

    fn n1(&self) -> usize {
        self.rho.algebra().rank()
    }

    pub fn to_combination(&self, z: &EndExtElement) -> Combination {
        let r = self.rho.rank();
        let n1 = self.n1();
        let mut c = Combination::zero(self.algebra.rank(), self.algebra.nvars());
        for (i, a) in z.u.support() {
            c.0[i] = a.clone();
        }
        for a in 0..r {
            for b in 0..r {
                c.0[n1 + a * r + b] = z.phi.get(a, b).clone();
            }
        }
        c
    }

    pub fn from_combination(&self, c: &Combination) -> EndExtElement {
        let r = self.rho.rank();
        let n1 = self.n1();
        let mut phi = PolyMatrix::zero(r, r, self.algebra.nvars());
        for a in 0..r {
            for b in 0..r {
                phi.set(a, b, c.coeff(n1 + a * r + b).clone());
            }
        }
        EndExtElement { phi, u: Combination(c.0[..n1].to_vec()) }
    }

    /// The defining formula
    /// `[(φ,u),(ψ,v)] = ([φ,ψ] + [ρ(u),ψ] − [ρ(v),φ] + R(u,v), [u,v])`,
    /// with the operator commutators certified `A`-linear.
    pub fn end_bracket(&self, z: &EndExtElement, w: &EndExtElement) -> Result<EndExtElement> {
        let rho = &self.rho;
        let a = operator_matrix(&rho.operator(&z.u).commutator(&DiffOperator::from_matrix(&w.phi)), "[rho(u), psi]")?;
        let b = operator_matrix(&rho.operator(&w.u).commutator(&DiffOperator::from_matrix(&z.phi)), "[rho(v), phi]")?;
        let rm = rho.curvature_matrix(&z.u, &w.u)?;
        let phi = &(&(&z.phi.commutator(&w.phi) + &a) - &b) + &rm;
        Ok(EndExtElement { phi, u: rho.algebra().bracket(&z.u, &w.u) })
    }

    /// `ρ^!(φ,u) = φ + ρ(u)`.
    pub fn rho_shriek(&self, z: &EndExtElement) -> DiffOperator {
        &DiffOperator::from_matrix(&z.phi) + &self.rho.operator(&z.u)
    }

    pub fn random_element(&self, rng: &mut sample::SampleRng, max_degree: u32) -> EndExtElement {
        self.from_combination(&self.algebra.random_combination(rng, max_degree))
    }

    /// The D-Lie suite on `End(L̃,E)`, plus agreement of the presented
    /// bracket with the defining formula on the sampled pairs.
    pub fn check_axioms(&self, cfg: SampleConfig) -> CheckReport {
        let mut rep = self.algebra.check_axioms(cfg);
        rep.name = "end_extension".into();
        let mut rng = sample::rng(cfg.seed ^ 0x5eed);
        let mut w = None;
        for _ in 0..cfg.samples {
            let z = self.random_element(&mut rng, cfg.max_degree);
            let y = self.random_element(&mut rng, cfg.max_degree);
            let pres = self.from_combination(&self.algebra.bracket(&self.to_combination(&z), &self.to_combination(&y)));
            match self.end_bracket(&z, &y) {
                Ok(direct) if direct == pres => {}
                Ok(direct) => w = w.or_else(|| Some(format!("z = {}, w = {}: {} vs {}", z, y, pres, direct))),
                Err(e) => w = w.or_else(|| Some(e.to_string())),
            }
        }
        rep.record("bracket_matches_formula", w);
        rep
    }

    /// `ρ^!([z,w]) = [ρ^!(z), ρ^!(w)]` on seeded pairs and exhaustively on
    /// monomial multiples of basis elements (matrix parts up to degree 2,
    /// `L̃` parts up to degree 1).
    pub fn check_hom(&self, cfg: SampleConfig, exhaustive: bool) -> CheckReport {
        let mut rep = CheckReport::new("rho_shriek_hom", Some(cfg.seed));
        let hom = |z: &Combination, y: &Combination| {
            let br = self.from_combination(&self.algebra.bracket(z, y));
            let lhs = self.rho_shriek(&br);
            let rhs = self.rho_shriek(&self.from_combination(z)).commutator(&self.rho_shriek(&self.from_combination(y)));
            (lhs != rhs).then(|| format!("z = {}, w = {}", fmt_comb(z), fmt_comb(y)))
        };
        let mut rng = sample::rng(cfg.seed);
        let mut w = None;
        for _ in 0..cfg.samples {
            let z = self.algebra.random_combination(&mut rng, cfg.max_degree);
            let y = self.algebra.random_combination(&mut rng, cfg.max_degree);
            w = w.or_else(|| hom(&z, &y));
        }
        rep.record("samples", w);

        if exhaustive {
            let m = self.algebra.nvars();
            let n1 = self.n1();
            let mut basis = Vec::new();
            for g in 0..self.algebra.rank() {
                let deg = if g < n1 { 1 } else { 2 };
                for mono in Monomial::all_up_to(m, deg) {
                    let p = Poly::monomial(m, mono, Rational::from_integer(1.into()));
                    basis.push(Combination::term(self.algebra.rank(), g, p));
                }
            }
            let mut w = None;
            for z in &basis {
                for y in &basis {
                    w = w.or_else(|| hom(z, y));
                }
            }
            rep.record("exhaustive", w);
        }
        let one = EndExtElement { phi: PolyMatrix::identity(self.rho.rank(), self.algebra.nvars()), u: Combination::zero(self.n1(), self.algebra.nvars()) };
        let d = EndExtElement { phi: PolyMatrix::zero(self.rho.rank(), self.rho.rank(), self.algebra.nvars()), u: self.rho.algebra().d() };
        let id = DiffOperator::identity(self.rho.rank(), self.algebra.nvars());
        rep.record(
            "units",
            (self.rho_shriek(&one) != id || self.rho_shriek(&d) != id).then(|| "rho!(Id,0) or rho!(0,D) is not the identity".to_string()),
        );
        rep
    }

    /// Samples products `P` of `i` and `Q` of `j` images of generators with
    /// `i + j ≤ degree + 1` and checks `ord P ≤ i`, `ord Q ≤ j`,
    /// `ord [P,Q] ≤ i + j − 1`.
    pub fn image_order_check(&self, degree: usize, pairs: usize, seed: u64) -> CheckReport {
        let mut rep = CheckReport::new("image_orders", Some(seed));
        let mut rng = sample::rng(seed);
        let gens: Vec<DiffOperator> = (0..self.algebra.rank())
            .map(|g| self.rho_shriek(&self.from_combination(&self.algebra.basis(g))))
            .collect();
        let product = |rng: &mut sample::SampleRng, len: usize| {
            let mut op = DiffOperator::identity(self.rho.rank(), self.algebra.nvars());
            for _ in 0..len {
                op = op.compose(&gens[rng.gen_range(0..gens.len())]);
            }
            op
        };
        let (mut wp, mut wc, mut same) = (None, None, None);
        for k in 0..pairs {
            let i = rng.gen_range(1..=degree.max(1));
            let j = rng.gen_range(1..=(degree + 1 - i).max(1));
            let p = product(&mut rng, i);
            let q = product(&mut rng, j);
            for (op, l) in [(&p, i), (&q, j)] {
                if diff_order(op, l as u32).is_none() {
                    wp = wp.or_else(|| Some(format!("pair {k}: product of {l} images has order > {l}")));
                }
            }
            let c = p.commutator(&q);
            if diff_order(&c, (i + j - 1) as u32).is_none() {
                wc = wc.or_else(|| Some(format!("pair {k}: commutator of orders {i},{j} exceeds {}", i + j - 1)));
            }
            if !p.commutator(&p).is_zero() {
                same = same.or_else(|| Some(format!("pair {k}: [P,P] != 0")));
            }
        }
        rep.record("product_orders", wp);
        rep.record("commutator_drops_order", wc);
        rep.record("self_commutator_zero", same);
        rep
    }
}

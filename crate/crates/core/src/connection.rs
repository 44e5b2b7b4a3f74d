//! Connections `ρ: L̃ → End_k(A^r)` given by Christoffel matrices and
//! `ψ = ρ(D)`, their curvature, and the correspondence with
//! `(L,ψ)`-connections.

use rand::Rng;

use crate::diffop::{diff_order, DiffOperator};
use crate::dlie::{fmt_comb, gen_name, DLieAlgebra};
use crate::error::{Error, Result};
use crate::lie_rinehart::{BracketStructure, Combination, LieRinehartPresentation, SampleConfig, ScalarCochain};
use crate::poly::{Poly, PolyMatrix};
use crate::report::CheckReport;
use crate::sample;

/// `ρ(uᵢ)(e) = Γᵢ e + ψ π̃(uᵢ)(e)` and `ρ(D) = ψ`, on `E = A^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    algebra: DLieAlgebra,
    rank: usize,
    gammas: Vec<PolyMatrix>,
    psi: PolyMatrix,
}

impl Connection {
    pub fn new(algebra: DLieAlgebra, gammas: Vec<PolyMatrix>, psi: PolyMatrix) -> Result<Self> {
        let r = psi.rows();
        if !psi.is_square() {
            return Err(Error::Precondition("psi must be square".into()));
        }
        if gammas.len() != algebra.n() {
            return Err(Error::RankMismatch { expected: algebra.n(), found: gammas.len() });
        }
        for g in &gammas {
            if g.rows() != r || g.cols() != r {
                return Err(Error::RankMismatch { expected: r, found: g.rows() });
            }
            if g.nvars() != algebra.nvars() {
                return Err(Error::VarMismatch { expected: algebra.nvars(), found: g.nvars() });
            }
        }
        if psi.nvars() != algebra.nvars() {
            return Err(Error::VarMismatch { expected: algebra.nvars(), found: psi.nvars() });
        }
        Ok(Connection { algebra, rank: r, gammas, psi })
    }

    /// Connection with `ψ = Id`.
    pub fn with_identity(algebra: DLieAlgebra, gammas: Vec<PolyMatrix>) -> Result<Self> {
        let r = gammas.first().map(PolyMatrix::rows).unwrap_or(1);
        let m = algebra.nvars();
        Self::new(algebra, gammas, PolyMatrix::identity(r, m))
    }

    /// All Christoffel matrices zero, `ψ = Id`.
    pub fn trivial(algebra: DLieAlgebra, r: usize) -> Self {
        let m = algebra.nvars();
        let gammas = vec![PolyMatrix::zero(r, r, m); algebra.n()];
        Connection { algebra, rank: r, gammas, psi: PolyMatrix::identity(r, m) }
    }

    pub fn algebra(&self) -> &DLieAlgebra {
        &self.algebra
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn nvars(&self) -> usize {
        self.algebra.nvars()
    }
    pub fn gammas(&self) -> &[PolyMatrix] {
        &self.gammas
    }
    pub fn psi(&self) -> &PolyMatrix {
        &self.psi
    }
    pub fn psi_is_identity(&self) -> bool {
        self.psi.is_identity()
    }

    fn require_identity(&self, what: &str) -> Result<()> {
        if self.psi_is_identity() {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{what} requires psi = Id, found {}", self.psi)))
        }
    }

    /// Direct evaluation `ρ(u)(e)`.
    pub fn apply(&self, u: &Combination, e: &[Poly]) -> Vec<Poly> {
        assert_eq!(e.len(), self.rank, "vector rank mismatch");
        let m = self.nvars();
        let mut out = vec![Poly::zero(m); self.rank];
        for (i, a) in u.support() {
            let mut v = if i == 0 {
                self.psi.apply(e)
            } else {
                let de: Vec<Poly> = e.iter().map(|p| self.algebra.anchor(i).apply(p)).collect();
                let mut v = self.gammas[i - 1].apply(e);
                for (x, y) in v.iter_mut().zip(self.psi.apply(&de)) {
                    *x += &y;
                }
                v
            };
            for (o, x) in out.iter_mut().zip(v.iter_mut()) {
                *o += &(a * x);
            }
        }
        out
    }

    /// `ρ(uᵢ)` as a differential operator.
    pub fn generator_operator(&self, i: usize) -> DiffOperator {
        if i == 0 {
            return DiffOperator::from_matrix(&self.psi);
        }
        let d = DiffOperator::derivation(self.algebra.anchor(i), self.rank).left_mul_matrix(&self.psi);
        &DiffOperator::from_matrix(&self.gammas[i - 1]) + &d
    }

    /// `ρ(u)` as a differential operator.
    pub fn operator(&self, u: &Combination) -> DiffOperator {
        let mut acc = DiffOperator::zero(self.rank, self.rank, self.nvars());
        for (i, a) in u.support() {
            let op = self.generator_operator(i).left_mul_matrix(&PolyMatrix::scalar(self.rank, a));
            acc = &acc + &op;
        }
        acc
    }

    /// `R(u,v) = [ρ(u),ρ(v)] − ρ([u,v])`.
    pub fn curvature(&self, u: &Combination, v: &Combination) -> DiffOperator {
        let c = self.operator(u).commutator(&self.operator(v));
        &c - &self.operator(&self.algebra.bracket(u, v))
    }

    /// Curvature as a matrix, certified `A`-linear by the order computation.
    pub fn curvature_matrix(&self, u: &Combination, v: &Combination) -> Result<PolyMatrix> {
        let r = self.curvature(u, v);
        match diff_order(&r, 0) {
            Some(0) => Ok(r.as_matrix().expect("order 0 operator has a matrix")),
            _ => Err(Error::NotALinear(format!("R({}, {}) = {}", fmt_comb(u), fmt_comb(v), r))),
        }
    }

    pub fn curvature_gen(&self, i: usize, j: usize) -> DiffOperator {
        self.curvature(&self.algebra.basis(i), &self.algebra.basis(j))
    }

    /// Copy with a different `ψ` (Christoffel data unchanged).
    pub fn with_psi(&self, psi: PolyMatrix) -> Result<Connection> {
        Connection::new(self.algebra.clone(), self.gammas.clone(), psi)
    }

    /// Left linearity, the `ψ`-twisted Leibniz rule, right linearity
    /// `ρ(uc) = ρ(u)c`, and agreement of the direct and operator routes.
    pub fn check_laws(&self, cfg: SampleConfig) -> CheckReport {
        let mut rep = CheckReport::new("connection_laws", Some(cfg.seed));
        let mut rng = sample::rng(cfg.seed);
        let m = self.nvars();
        let (mut left, mut leibniz, mut right, mut routes) = (None, None, None, None);
        for _ in 0..cfg.samples {
            let u = self.algebra.random_combination(&mut rng, cfg.max_degree);
            let a = sample::poly(&mut rng, m, cfg.max_degree, 3);
            let e = sample::vector(&mut rng, self.rank, m, cfg.max_degree + 1);

            let lhs = self.operator(&u.scale(&a));
            let rhs = self.operator(&u).left_mul_matrix(&PolyMatrix::scalar(self.rank, &a));
            if lhs != rhs {
                left = left.or_else(|| Some(format!("u = {}, a = {}", fmt_comb(&u), a)));
            }

            let ae: Vec<Poly> = e.iter().map(|p| &a * p).collect();
            let lhs = self.apply(&u, &ae);
            let pa = self.algebra.anchor_of(&u).apply(&a);
            let psie = self.psi.apply(&e);
            let rhs: Vec<Poly> =
                self.apply(&u, &e).iter().zip(&psie).map(|(x, y)| &(&a * x) + &(&pa * y)).collect();
            if lhs != rhs {
                leibniz = leibniz.or_else(|| Some(format!("u = {}, a = {}", fmt_comb(&u), a)));
            }

            let lhs = self.operator(&self.algebra.right_mul(&u, &a));
            let rhs = self.operator(&u).compose(&DiffOperator::from_matrix(&PolyMatrix::scalar(self.rank, &a)));
            if lhs != rhs {
                right = right.or_else(|| Some(format!("u = {}, c = {}", fmt_comb(&u), a)));
            }

            if self.operator(&u).apply(&e) != self.apply(&u, &e) {
                routes = routes.or_else(|| Some(format!("u = {}", fmt_comb(&u))));
            }
        }
        rep.record("left_linear", left);
        rep.record("psi_leibniz", leibniz);
        rep.record("right_linear", right);
        rep.record("direct_matches_operator", routes);
        rep
    }

    /// Compares the curvature on `L(α*f)` with the curvature of the
    /// restriction `∇ = ρ∘i` to `L`.
    ///
    /// For `u = az + x`, `v = bz + y` one has
    /// `R_ρ(u,v) = R_∇(x,y) + a[ψ,∇y] − b[ψ,∇x] + (α(x)(b) − α(y)(a))(ψ² − ψ) − g(x,y)ψ`,
    /// which collapses to `R_∇(x,y) − g(x,y)ψ` on pairs from `L` and, for
    /// `ψ = Id`, on all pairs. Both forms are checked where they apply.
    pub fn curvature_transfer_check(&self, cfg: SampleConfig) -> Result<CheckReport> {
        let base = self
            .algebra
            .base()
            .ok_or_else(|| Error::Precondition("connection is not over an extension L(g)".into()))?
            .clone();
        let g = self.algebra.cocycle().expect("extensions carry their cocycle").clone();
        let mut rep = CheckReport::new("curvature_transfer", Some(cfg.seed));
        let r = self.rank;
        let psi_op = DiffOperator::from_matrix(&self.psi);
        let psi2_minus_psi = DiffOperator::from_matrix(&(&(&self.psi * &self.psi) - &self.psi));
        let nabla = |x: &Combination| self.operator(&self.algebra.lift(x));
        let r_nabla = |x: &Combination, y: &Combination| {
            let c = nabla(x).commutator(&nabla(y));
            &c - &nabla(&base.bracket(x, y))
        };
        let scal = |a: &Poly| PolyMatrix::scalar(r, a);

        let stated = |u: &Combination, v: &Combination| {
            let (_, x) = self.algebra.split(u);
            let (_, y) = self.algebra.split(v);
            &r_nabla(&x, &y) - &psi_op.left_mul_matrix(&scal(&g.eval(&[x, y])))
        };
        let general = |u: &Combination, v: &Combination| {
            let (a, x) = self.algebra.split(u);
            let (b, y) = self.algebra.split(v);
            let gxy = g.eval(&[x.clone(), y.clone()]);
            let t = &base.anchor_of(&x).apply(&b) - &base.anchor_of(&y).apply(&a);
            let mut acc = r_nabla(&x, &y);
            acc = &acc + &psi_op.commutator(&nabla(&y)).left_mul_matrix(&scal(&a));
            acc = &acc - &psi_op.commutator(&nabla(&x)).left_mul_matrix(&scal(&b));
            acc = &acc + &psi2_minus_psi.left_mul_matrix(&scal(&t));
            &acc - &psi_op.left_mul_matrix(&scal(&gxy))
        };
        let cmp = |u: &Combination, v: &Combination, rhs: DiffOperator| {
            let lhs = self.curvature(u, v);
            (lhs != rhs).then(|| format!("u = {}, v = {}: R_rho = {} but formula gives {}", fmt_comb(u), fmt_comb(v), lhs, rhs))
        };

        let n1 = self.algebra.rank();
        let gens: Vec<Combination> = (0..n1).map(|i| self.algebra.basis(i)).collect();
        let mut rng = sample::rng(cfg.seed);
        let samples: Vec<(Combination, Combination)> = (0..cfg.samples)
            .map(|_| {
                (
                    self.algebra.random_combination(&mut rng, cfg.max_degree),
                    self.algebra.random_combination(&mut rng, cfg.max_degree),
                )
            })
            .collect();

        let mut w = None;
        for u in &gens[1..] {
            for v in &gens[1..] {
                w = w.or_else(|| cmp(u, v, stated(u, v)));
            }
        }
        rep.record("stated_on_l_generators", w);
        if self.psi_is_identity() {
            let mut w = None;
            for u in &gens {
                for v in &gens {
                    w = w.or_else(|| cmp(u, v, stated(u, v)));
                }
            }
            for (u, v) in &samples {
                w = w.or_else(|| cmp(u, v, stated(u, v)));
            }
            rep.record("stated_on_all_pairs_and_samples", w);
        } else {
            rep.not_applicable(
                "stated_on_all_pairs_and_samples",
                "the uncorrected form assumes psi = Id on pairs with a z-component or A-coefficients",
            );
        }
        let mut w = None;
        for u in &gens {
            for v in &gens {
                w = w.or_else(|| cmp(u, v, general(u, v)));
            }
        }
        rep.record("general_on_generators", w);
        let mut w = None;
        for (u, v) in &samples {
            w = w.or_else(|| cmp(u, v, general(u, v)));
        }
        rep.record("general_on_samples", w);
        Ok(rep)
    }

    /// Orders certified by iterated commutators: `ord ρ(u) ≤ 1`, curvature
    /// of order 0 when `ψ = Id` and at most 1 otherwise, and products of `i`
    /// generator images of order at most `i` for `i ≤ max_len`.
    pub fn order_check(&self, cfg: SampleConfig, max_len: usize) -> CheckReport {
        let mut rep = CheckReport::new("operator_orders", Some(cfg.seed));
        let t = &self.algebra;
        let mut rng = sample::rng(cfg.seed);
        let curv_bound = if self.psi_is_identity() { 0 } else { 1 };
        let (mut first, mut curv, mut prod) = (None, None, None);
        for k in 0..cfg.samples {
            let u = t.random_combination(&mut rng, cfg.max_degree);
            let v = t.random_combination(&mut rng, cfg.max_degree);
            if diff_order(&self.operator(&u), 1).is_none() {
                first = first.or_else(|| Some(format!("sample {k}: rho({}) has order > 1", fmt_comb(&u))));
            }
            if diff_order(&self.curvature(&u, &v), curv_bound).is_none() {
                curv = curv.or_else(|| Some(format!("sample {k}: R({}, {}) has order > {curv_bound}", fmt_comb(&u), fmt_comb(&v))));
            }
            let len = 1 + k % max_len.max(1);
            let mut op = DiffOperator::identity(self.rank, self.nvars());
            let mut names = Vec::new();
            for _ in 0..len {
                let g = rng.gen_range(0..t.rank());
                names.push(gen_name(g));
                op = op.compose(&self.generator_operator(g));
            }
            if diff_order(&op, len as u32).is_none() {
                prod = prod.or_else(|| Some(format!("sample {k}: rho({}) has order > {len}", names.join(")rho("))));
            }
        }
        rep.record("connection_order_le_1", first);
        rep.record("curvature_order", curv);
        rep.record("product_order", prod);
        rep
    }

    /// Curvature type `f`: `R(uᵢ,uⱼ) = f̃(uᵢ,uⱼ)·Id` for all generator pairs,
    /// where `f` is a 2-cochain on the `n` non-central generators and
    /// `f̃(D,·) = 0`. Returns `None` on success, else a witness.
    pub fn curvature_type_witness(&self, f: &ScalarCochain) -> Result<Option<String>> {
        self.require_identity("curvature type check")?;
        let n = self.algebra.n();
        if f.rank() != n || f.degree() != 2 {
            return Err(Error::RankMismatch { expected: n, found: f.rank() });
        }
        let m = self.nvars();
        for i in 0..=n {
            for j in i + 1..=n {
                let ftilde = if i == 0 { Poly::zero(m) } else { f.get(&[i - 1, j - 1]) };
                let expect = DiffOperator::from_matrix(&PolyMatrix::scalar(self.rank, &ftilde));
                let got = self.curvature_gen(i, j);
                if got != expect {
                    return Ok(Some(format!(
                        "R({}, {}) = {} but f = {}",
                        gen_name(i),
                        gen_name(j),
                        got,
                        ftilde
                    )));
                }
            }
        }
        Ok(None)
    }

    pub fn curvature_type_check(&self, f: &ScalarCochain) -> Result<bool> {
        Ok(self.curvature_type_witness(f)?.is_none())
    }

    /// The `(L,ψ)`-connection `∇ = ρ∘i` together with `ψ`.
    pub fn to_psi_connection(&self) -> Result<PsiConnection> {
        let lr = self
            .algebra
            .base()
            .ok_or_else(|| Error::Precondition("connection is not over an extension L(g)".into()))?
            .clone();
        Ok(PsiConnection { lr, rank: self.rank, gammas: self.gammas.clone(), psi: self.psi.clone() })
    }
}

/// An `(L,ψ)`-connection: `∇(eᵢ)(e) = Γᵢ e + ψ α(eᵢ)(e)` on `A^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiConnection {
    pub lr: LieRinehartPresentation,
    pub rank: usize,
    pub gammas: Vec<PolyMatrix>,
    pub psi: PolyMatrix,
}

impl PsiConnection {
    /// `ρ(az + x) = aψ + ∇(x)` on the extension `L(g)`.
    pub fn to_connection(&self, algebra: &DLieAlgebra) -> Result<Connection> {
        if algebra.base() != Some(&self.lr) {
            return Err(Error::Precondition("extension is not built over this Lie-Rinehart algebra".into()));
        }
        Connection::new(algebra.clone(), self.gammas.clone(), self.psi.clone())
    }

    /// `∇(x)` as an operator.
    pub fn operator(&self, x: &Combination) -> DiffOperator {
        let r = self.rank;
        let mut acc = DiffOperator::zero(r, r, self.lr.nvars());
        for (i, a) in x.support() {
            let d = DiffOperator::derivation(self.lr.anchor(i), r).left_mul_matrix(&self.psi);
            let op = (&DiffOperator::from_matrix(&self.gammas[i]) + &d).left_mul_matrix(&PolyMatrix::scalar(r, a));
            acc = &acc + &op;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Derivation};

    fn p(s: &str) -> Poly {
        parse_poly(s, 2).unwrap()
    }

    fn ext(fc: &str) -> DLieAlgebra {
        let mut f = ScalarCochain::zero(2, 2, 2);
        f.set(&[0, 1], p(fc));
        DLieAlgebra::build_extension(&LieRinehartPresentation::derivations(2), &f).unwrap()
    }

    #[test]
    fn pure_derivative() {
        let t = DLieAlgebra::build_extension(&LieRinehartPresentation::derivations(1), &ScalarCochain::zero(1, 1, 2)).unwrap();
        let rho = Connection::trivial(t.clone(), 1);
        let x2 = parse_poly("x^2", 1).unwrap();
        assert_eq!(rho.apply(&t.basis(1), &[x2]), vec![parse_poly("2*x", 1).unwrap()]);
        assert_eq!(rho.apply(&t.d(), &[parse_poly("x", 1).unwrap()]), vec![parse_poly("x", 1).unwrap()]);
    }

    #[test]
    fn curvature_by_composition() {
        let t = ext("0");
        let gx = PolyMatrix::from_rows(vec![vec![p("0"), p("1")], vec![p("0"), p("0")]]);
        let gy = PolyMatrix::from_rows(vec![vec![p("0"), p("0")], vec![p("y"), p("0")]]);
        let rho = Connection::with_identity(t.clone(), vec![gx.clone(), gy.clone()]).unwrap();
        let expect = &(&Derivation::partial(2, 0).apply_matrix(&gy) - &Derivation::partial(2, 1).apply_matrix(&gx))
            + &gx.commutator(&gy);
        let r = rho.curvature_matrix(&t.basis(1), &t.basis(2)).unwrap();
        assert_eq!(r, expect);
        // independent route: apply twice on the standard basis
        for k in 0..2 {
            let mut e = vec![p("0"), p("0")];
            e[k] = p("1");
            let a = rho.apply(&t.basis(1), &rho.apply(&t.basis(2), &e));
            let b = rho.apply(&t.basis(2), &rho.apply(&t.basis(1), &e));
            let col: Vec<Poly> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            assert_eq!(col, r.apply(&e));
        }
    }

    #[test]
    fn curvature_type_and_negative_control() {
        let t = ext("0");
        let z = PolyMatrix::zero(2, 2, 2);
        let rho = Connection::with_identity(t, vec![z, PolyMatrix::scalar(2, &p("x"))]).unwrap();
        let mut f1 = ScalarCochain::zero(2, 2, 2);
        f1.set(&[0, 1], p("1"));
        assert!(rho.curvature_type_check(&f1).unwrap());
        let w = rho.curvature_type_witness(&ScalarCochain::zero(2, 2, 2)).unwrap();
        assert!(w.unwrap().starts_with("R(u1, u2)"));
    }

    #[test]
    fn flat_nabla_with_constant_cocycle() {
        let t = ext("1");
        let rho = Connection::trivial(t.clone(), 2);
        let r = rho.curvature_matrix(&t.basis(1), &t.basis(2)).unwrap();
        assert_eq!(r, -&PolyMatrix::identity(2, 2));
        assert!(rho.curvature_transfer_check(SampleConfig::default()).unwrap().passed());
    }

    #[test]
    fn psi_identity_required() {
        let rho = Connection::trivial(ext("0"), 2).with_psi(PolyMatrix::scalar(2, &p("2"))).unwrap();
        assert!(rho.curvature_type_check(&ScalarCochain::zero(2, 2, 2)).is_err());
    }
}

//! Modules presented by a projective basis inside `A^r`, the connection
//! `ρ(D)(e) = Σ D(xᵢ(e))eᵢ` and its curvature.

use crate::diffop::{diff_order, generic_vector, DiffOperator};
use crate::error::{Error, Result};
use crate::poly::{Derivation, Poly, PolyMatrix};
use crate::report::CheckReport;

/// Functionals `x₁..x_s` (rows of `X`, an `s×r` matrix) and vectors
/// `e₁..e_s` (columns of `W`, an `r×s` matrix) with `Σ xᵢ(e)eᵢ = e` on the
/// presented module. The Gram matrix `φ = XW` has `φ[i][j] = xᵢ(eⱼ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveBasis {
    x: PolyMatrix,
    w: PolyMatrix,
}

impl ProjectiveBasis {
    pub fn new(x: PolyMatrix, w: PolyMatrix) -> Result<Self> {
        if x.cols() != w.rows() || x.rows() != w.cols() {
            return Err(Error::Precondition("functionals and vectors have incompatible shapes".into()));
        }
        let pb = ProjectiveBasis { x, w };
        let phi = pb.gram();
        if &phi * &phi != phi {
            return Err(Error::Precondition(format!("phi = {} is not idempotent", phi)));
        }
        Ok(pb)
    }

    /// The image of an idempotent `P`, with coordinate functionals and
    /// generators `P εⱼ`.
    pub fn from_idempotent(p: &PolyMatrix) -> Result<Self> {
        Self::new(PolyMatrix::identity(p.rows(), p.nvars()), p.clone())
    }

    /// The free module `A^r` with its standard dual pair.
    pub fn free(r: usize, nvars: usize) -> Self {
        ProjectiveBasis { x: PolyMatrix::identity(r, nvars), w: PolyMatrix::identity(r, nvars) }
    }

    pub fn functionals(&self) -> &PolyMatrix {
        &self.x
    }
    pub fn vectors(&self) -> &PolyMatrix {
        &self.w
    }
    pub fn ambient_rank(&self) -> usize {
        self.x.cols()
    }
    pub fn size(&self) -> usize {
        self.x.rows()
    }
    pub fn nvars(&self) -> usize {
        self.x.nvars()
    }

    /// `φ = XW`.
    pub fn gram(&self) -> PolyMatrix {
        &self.x * &self.w
    }

    /// The projection `WX` of `A^r` onto the module.
    pub fn projection(&self) -> PolyMatrix {
        &self.w * &self.x
    }

    /// `ρ(D) = W (D ⊗ Id_s) X` for a scalar operator `D`.
    pub fn rho(&self, d: &DiffOperator) -> DiffOperator {
        assert_eq!((d.rows(), d.cols()), (1, 1), "expected a scalar operator");
        let s = self.size();
        let mut ds = DiffOperator::zero(s, s, self.nvars());
        for (beta, c) in d.terms() {
            ds = &ds + &DiffOperator::term(&PolyMatrix::scalar(s, c.get(0, 0)), beta.clone());
        }
        DiffOperator::from_matrix(&self.w).compose(&ds).compose(&DiffOperator::from_matrix(&self.x))
    }

    /// `ρ(δ)` for a derivation.
    pub fn rho_derivation(&self, d: &Derivation) -> DiffOperator {
        self.rho(&DiffOperator::derivation(d, 1))
    }

    /// `R^{k,l}(D,D') = ρ(D∘D') − ρ(D)ρ(D')`.
    pub fn rkl(&self, d: &DiffOperator, d2: &DiffOperator) -> DiffOperator {
        &self.rho(&d.compose(d2)) - &self.rho(d).compose(&self.rho(d2))
    }

    /// `R(δ,η) = [ρδ,ρη] − ρ[δ,η]`.
    pub fn curvature(&self, delta: &Derivation, eta: &Derivation) -> DiffOperator {
        let c = self.rho_derivation(delta).commutator(&self.rho_derivation(eta));
        &c - &self.rho_derivation(&delta.bracket(eta))
    }

    /// Checks `R^{1,1}(δ,η) − R^{1,1}(η,δ) = −R(δ,η)` with the curvature
    /// convention `R = [ρδ,ρη] − ρ[δ,η]`.
    pub fn rkl_antisymmetrization_witness(&self, delta: &Derivation, eta: &Derivation) -> Option<String> {
        let dd = DiffOperator::derivation(delta, 1);
        let de = DiffOperator::derivation(eta, 1);
        let lhs = &self.rkl(&dd, &de) - &self.rkl(&de, &dd);
        let rhs = -&self.curvature(delta, eta);
        (lhs != rhs).then(|| format!("delta = {}, eta = {}: {} vs {}", delta, eta, lhs, rhs))
    }

    /// Curvature of the connection through `φ = XW`:
    /// with `M = [δ(φ), η(φ)]`, checks `φMφ = Mφ`, `φM(1−φ) = 0`, and
    /// `R(δ,η)∘W∘φ = W∘M∘φ` both in canonical form and on a generic vector.
    pub fn idempotent_curvature_check(&self, delta: &Derivation, eta: &Derivation) -> CheckReport {
        let mut rep = CheckReport::new("idempotent_curvature", None);
        let phi = self.gram();
        let s = self.size();
        let m_nvars = self.nvars();
        let mm = delta.apply_matrix(&phi).commutator(&eta.apply_matrix(&phi));
        let one_minus = &PolyMatrix::identity(s, m_nvars) - &phi;

        let a = &(&(&phi * &mm) * &phi) - &(&mm * &phi);
        rep.record("image_compatible", (!a.is_zero()).then(|| format!("phi M phi - M phi = {}", a)));
        let b = &(&phi * &mm) * &one_minus;
        rep.record("kernel_preserved", (!b.is_zero()).then(|| format!("phi M (1 - phi) = {}", b)));

        let r = self.curvature(delta, eta);
        let lhs = r.compose(&DiffOperator::from_matrix(&(&self.w * &phi)));
        let rhs = DiffOperator::from_matrix(&(&(&self.w * &mm) * &phi));
        rep.record(
            "curvature_equals_commutator",
            (lhs != rhs).then(|| format!("R W phi = {} but W M phi = {}", lhs, rhs)),
        );

        // independent route: compose ∇(δ)∇(η) − ∇(η)∇(δ) − ∇([δ,η]) on a
        // generic vector v in the image of φ
        let order = r.top_degree().unwrap_or(0);
        let v = generic_vector(s, m_nvars, order.max(1));
        let big = v[0].nvars();
        let wphi = (&self.w * &phi).extend(big);
        let e = wphi.apply(&v);
        let nabla = |d: &Derivation, e: &[Poly]| -> Vec<Poly> {
            let dx: Vec<Poly> = self.x.extend(big).apply(e).iter().map(|p| extend_derivation(d, big).apply(p)).collect();
            self.w.extend(big).apply(&dx)
        };
        let t1 = nabla(delta, &nabla(eta, &e));
        let t2 = nabla(eta, &nabla(delta, &e));
        let t3 = nabla(&delta.bracket(eta), &e);
        let direct: Vec<Poly> = (0..e.len()).map(|k| &(&t1[k] - &t2[k]) - &t3[k]).collect();
        let expect = (&(&self.w * &mm) * &phi).extend(big).apply(&v);
        rep.record(
            "generic_vector",
            (direct != expect).then(|| "direct curvature differs from W M phi on a generic vector".to_string()),
        );
        rep
    }

    /// Order bound of `ρ(D)` for an order-`l` scalar operator.
    pub fn order_certificate(&self, d: &DiffOperator, l: u32) -> Option<String> {
        match diff_order(&self.rho(d), l) {
            Some(k) if k <= l => None,
            _ => Some(format!("rho({}) exceeds order {}", d, l)),
        }
    }
}

/// A derivation of the smaller ring acting on the enlarged one (zero on the
/// fresh variables).
fn extend_derivation(d: &Derivation, nvars: usize) -> Derivation {
    let mut coeffs: Vec<Poly> = d.coeffs().iter().map(|c| c.extend(nvars)).collect();
    coeffs.resize(nvars, Poly::zero(nvars));
    Derivation::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, 2).unwrap()
    }

    fn uw() -> ProjectiveBasis {
        let u = PolyMatrix::column(vec![p("1"), p("x")]);
        let w = PolyMatrix::row(vec![p("1 - x*y"), p("y")]);
        ProjectiveBasis::from_idempotent(&(&u * &w)).unwrap()
    }

    #[test]
    fn identity_operator_projects() {
        let pb = uw();
        let id = DiffOperator::identity(1, 2);
        assert_eq!(pb.rho(&id), DiffOperator::from_matrix(&pb.projection()));
    }

    #[test]
    fn free_module_is_coordinatewise() {
        let pb = ProjectiveBasis::free(2, 2);
        let dx = Derivation::partial(2, 0);
        assert_eq!(pb.rho_derivation(&dx), DiffOperator::derivation(&dx, 2));
        let dy = DiffOperator::derivation(&Derivation::partial(2, 1), 1);
        assert!(pb.rkl(&DiffOperator::derivation(&dx, 1), &dy).is_zero());
    }

    #[test]
    fn rho_of_dx_expands_on_symbolic_vector() {
        // Σ ∂x(xᵢ(e)) eᵢ = φ ∂x(e) for coordinate functionals
        let pb = uw();
        let dx = Derivation::partial(2, 0);
        let v = generic_vector(2, 2, 2);
        let big = v[0].nvars();
        let dv: Vec<Poly> = v.iter().map(|q| extend_derivation(&dx, big).apply(q)).collect();
        let expect = pb.projection().extend(big).apply(&dv);
        assert_eq!(pb.rho_derivation(&dx).extend(big).apply(&v), expect);
    }

    #[test]
    fn non_idempotent_rejected() {
        let m = PolyMatrix::scalar(2, &p("2"));
        assert!(ProjectiveBasis::from_idempotent(&m).is_err());
    }

    #[test]
    fn uw_curvature() {
        let pb = uw();
        let (dx, dy) = (Derivation::partial(2, 0), Derivation::partial(2, 1));
        let rep = pb.idempotent_curvature_check(&dx, &dy);
        assert!(rep.passed(), "{:?}", rep);
        assert!(!pb.curvature(&dx, &dy).is_zero());
        assert!(pb.rkl_antisymmetrization_witness(&dx, &dy).is_none());
    }
}

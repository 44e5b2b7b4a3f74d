use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::{Poly, PolyMatrix, Rational};

/// A k-derivation `Σ cᵢ ∂/∂xᵢ` of `Q[x1..xm]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    coeffs: Vec<Poly>,
}

impl Derivation {
    pub fn new(coeffs: Vec<Poly>) -> Self {
        let m = coeffs.len();
        assert!(coeffs.iter().all(|c| c.nvars() == m), "derivation coefficients must live in Q[x1..xm] with m = number of coefficients");
        Derivation { coeffs }
    }

    pub fn zero(nvars: usize) -> Self {
        Derivation { coeffs: vec![Poly::zero(nvars); nvars] }
    }

    /// The coordinate derivation `∂/∂x_{i+1}`.
    pub fn partial(nvars: usize, i: usize) -> Self {
        let mut d = Self::zero(nvars);
        d.coeffs[i] = Poly::one(nvars);
        d
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// `Σ cᵢ ∂p/∂xᵢ`.
    pub fn apply(&self, p: &Poly) -> Poly {
        assert_eq!(p.nvars(), self.nvars(), "derivation and polynomial variable counts differ");
        let mut out = Poly::zero(p.nvars());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let dp = p.partial(i);
            if !dp.is_zero() {
                out += &(c * &dp);
            }
        }
        out
    }

    /// Commutator `[self, other]` as a derivation.
    pub fn bracket(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.nvars(), other.nvars(), "derivation variable counts differ");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.apply(b) - other.apply(a))
            .collect();
        Derivation { coeffs }
    }

    pub fn scale(&self, a: &Poly) -> Derivation {
        Derivation { coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    pub fn scale_q(&self, c: &Rational) -> Derivation {
        Derivation { coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    /// Entrywise application to a matrix.
    pub fn apply_matrix(&self, m: &PolyMatrix) -> PolyMatrix {
        m.map(|p| self.apply(p))
    }
}

/// Entrywise derivative `d(M)`.
pub fn matrix_derivative(d: &Derivation, m: &PolyMatrix) -> PolyMatrix {
    d.apply_matrix(m)
}

impl Add<&Derivation> for &Derivation {
    type Output = Derivation;
    fn add(self, rhs: &Derivation) -> Derivation {
        assert_eq!(self.nvars(), rhs.nvars());
        Derivation { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&Derivation> for &Derivation {
    type Output = Derivation;
    fn sub(self, rhs: &Derivation) -> Derivation {
        assert_eq!(self.nvars(), rhs.nvars());
        Derivation { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Derivation {
    type Output = Derivation;
    fn neg(self) -> Derivation {
        Derivation { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "d{}", i + 1)?;
            } else {
                write!(f, "({})*d{}", c, i + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, 2).unwrap()
    }

    #[test]
    fn application() {
        let dx = Derivation::partial(2, 0);
        assert_eq!(dx.apply(&p("x^2")), p("2*x"));
        assert!(dx.apply(&p("5")).is_zero());
        // x ∂y applied to y³ expanded by hand: 3xy²
        let xdy = Derivation::new(vec![p("0"), p("x")]);
        assert_eq!(xdy.apply(&p("y^3")), p("3*x*y^2"));
    }

    #[test]
    fn brackets() {
        let dx = Derivation::partial(2, 0);
        let dy = Derivation::partial(2, 1);
        assert!(dx.bracket(&dy).is_zero());
        let xdx = Derivation::new(vec![p("x"), p("0")]);
        assert!(xdx.bracket(&xdx).is_zero());
        // compose both orders on x, x², x³: x∂x∂x(x^k) - ∂x(x∂x x^k) = -k x^(k-1)
        let br = xdx.bracket(&dx);
        for k in 1..=3u32 {
            let mono = p("x").pow(k);
            let lhs = br.apply(&mono);
            let rhs = xdx.apply(&dx.apply(&mono)) - dx.apply(&xdx.apply(&mono));
            assert_eq!(lhs, rhs);
        }
        assert_eq!(br, -&dx);
    }

    #[test]
    fn matrix_derivatives() {
        let dx = Derivation::partial(2, 0);
        let m = PolyMatrix::from_rows(vec![vec![p("x"), p("x^2")], vec![p("0"), p("1")]]);
        let expect = PolyMatrix::from_rows(vec![vec![p("1"), p("2*x")], vec![p("0"), p("0")]]);
        assert_eq!(matrix_derivative(&dx, &m), expect);
        assert!(matrix_derivative(&dx, &PolyMatrix::identity(3, 2)).is_zero());
    }
}

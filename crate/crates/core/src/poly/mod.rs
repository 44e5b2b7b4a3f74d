//! Exact arithmetic over `A = Q[x1..xm]`: polynomials, derivations, matrices.

mod derivation;
mod matrix;
mod monomial;
mod parse;
#[allow(clippy::module_inception)]
mod poly;

pub use derivation::{matrix_derivative, Derivation};
pub use matrix::PolyMatrix;
pub use monomial::Monomial;
pub use parse::{parse_poly, ParseError};
pub use poly::{rat, ratio, Poly};

/// Exact rational scalars.
pub type Rational = num_rational::BigRational;

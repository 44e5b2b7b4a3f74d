//! Exact symbolic kernel for D-Lie algebras over polynomial rings.
//!
//! Everything is computed over `Q[x1..xm]` with exact rationals. Identities
//! that the theory asserts are exposed as checks returning a [`CheckReport`],
//! so they can be run on concrete examples and negative controls alike.

pub mod chern;
pub mod connection;
pub mod diffop;
pub mod dlie;
pub mod error;
pub mod jet;
pub mod library;
pub mod lie_rinehart;
pub mod nonabelian;
pub mod poly;
pub mod projective;
pub mod report;
pub mod sample;
pub mod tensor;

pub use error::Error;
pub use report::{CheckReport, CheckResult, Outcome};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: expected {expected}, found {found}")]
    VarMismatch { expected: usize, found: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("cochain is not a cocycle: {witness}")]
    NotCocycle { witness: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("operator is not A-linear: {0}")]
    NotALinear(String),
    #[error("rewriting exceeded the step budget of {0}")]
    StepBudgetExceeded(usize),
    #[error("no connection: {0}")]
    NoConnection(String),
    #[error(transparent)]
    Parse(#[from] crate::poly::ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;

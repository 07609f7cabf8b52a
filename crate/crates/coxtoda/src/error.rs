use thiserror::Error;

/// Every failure the library reports. Variants map one-to-one onto the
/// status codes of the C ABI and onto CLI exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxError {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),
    #[error("not a Coxeter element: {0}")]
    NotCoxeter(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-generic input: {0}")]
    NonGeneric(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("flow diverged: {0}")]
    FlowDiverged(String),
}

pub type Result<T> = std::result::Result<T, CoxError>;

impl CoxError {
    /// Short stable name, used in JSON reports.
    pub fn kind(&self) -> &'static str {
        match self {
            CoxError::Argument(_) => "ArgumentError",
            CoxError::SingularMatrix(_) => "SingularMatrix",
            CoxError::NumericOverflow(_) => "NumericOverflow",
            CoxError::NotCoxeter(_) => "NotCoxeter",
            CoxError::InvalidParams(_) => "InvalidParams",
            CoxError::NonGeneric(_) => "NonGeneric",
            CoxError::Range(_) => "RangeError",
            CoxError::InvalidMove(_) => "InvalidMove",
            CoxError::FlowDiverged(_) => "FlowDiverged",
        }
    }
}

use thiserror::Error;

/// Errors raised by the numerical and algebraic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("functional has support at {index} beyond the jet degree bound {bound}")]
    SupportBeyondBound { index: String, bound: u32 },

    #[error("the zero functional has no order")]
    ZeroFunctional,

    #[error("zero jet where a nonzero germ is required")]
    ZeroJet,

    #[error("ideal not proper at level {0}")]
    NotProper(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("functional unbounded on A2_psi: support index {0} has infinite weighted norm")]
    Unbounded(String),

    #[error("matrix numerically singular: {0}")]
    Singular(String),

    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("no exact representation: {0}")]
    NotExact(String),

    #[error("exhaustion sequence not nested at step {0}")]
    NotNested(usize),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

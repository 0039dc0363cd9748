use thiserror::Error;

/// Coarse classification used for process exit codes and C error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad dimension, index or malformed input.
    Usage,
    /// Input is well formed but violates a mathematical precondition.
    Invariant,
    /// A numerical procedure failed to produce a valid result.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension n = {0} is outside the supported range 2..=9")]
    UnsupportedDimension(usize),

    #[error("generator index {index} out of range for so({n}) (dimension {dim})")]
    IndexOutOfRange { n: usize, index: usize, dim: usize },

    #[error("so({n}) needs {expected} coefficients, got {got}")]
    LengthMismatch { n: usize, expected: usize, got: usize },

    #[error("coefficient {0} is not finite")]
    NonFinite(usize),

    #[error("matrix shape {rows}x{cols} does not match so({n})")]
    Shape { n: usize, rows: usize, cols: usize },

    #[error("matrix is not antisymmetric (max |M + M^T| = {max_asymmetry:e})")]
    NotAntisymmetric { max_asymmetry: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("zero algebra element has no normalized invariants")]
    DegenerateInput,

    #[error("invariant {name} = {value} is outside its allowed range")]
    InvariantViolation { name: &'static str, value: f64 },

    #[error("root solver failed; residuals {residuals:?}")]
    NumericalFailure { residuals: Vec<f64> },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnsupportedDimension(_)
            | Error::IndexOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::NonFinite(_)
            | Error::Shape { .. }
            | Error::NotAntisymmetric { .. }
            | Error::Domain(_) => ErrorKind::Usage,
            Error::DegenerateInput | Error::InvariantViolation { .. } => ErrorKind::Invariant,
            Error::NumericalFailure { .. } | Error::Consistency(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

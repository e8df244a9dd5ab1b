use thiserror::Error;

/// Errors surfaced by the library.
///
/// Singular matrices and non-generic Krylov vectors are not errors: they are
/// ordinary outcomes (`Option` / [`crate::frobenius::NotGeneric`]) that callers
/// branch on.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("power series with zero constant term is not invertible")]
    NotInvertibleSeries,
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate update position ({0}, {1})")]
    DuplicatePosition(usize, usize),
    #[error("edge ({0}, {1}) already present")]
    EdgeAlreadyPresent(usize, usize),
    #[error("edge ({0}, {1}) absent")]
    EdgeAbsent(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge weight {weight} outside [1, {max}]")]
    WeightOutOfRange { weight: u32, max: u32 },
    #[error("matrix is not generic: no Frobenius form found after {attempts} attempts")]
    GenericityFailure { attempts: usize },
    #[error("invalid modulus {0}: must be an odd prime below 2^63")]
    InvalidModulus(u64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, size: usize) -> Result<()> {
    if index < size {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, size })
    }
}

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}

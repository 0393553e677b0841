use thiserror::Error;

/// Errors shared by all lattice operations.
///
/// Everything in this crate is exact, so an error always means the input
/// violated a precondition, never a numerical failure.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("form is degenerate: {0}")]
    Degenerate(String),
    #[error("matrix does not preserve the gram matrix")]
    NotAnIsometry,
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("isometries live on different lattices")]
    LatticeMismatch,
    #[error("reflection in {0} is not integral on this lattice")]
    NonIntegralReflection(String),
    #[error("vector is isotropic where a nonzero square is required")]
    IsotropicVector,
    #[error("zero vector not allowed here")]
    ZeroVector,
    #[error("lattice must be even for this operation")]
    OddLattice,
    #[error("transvection requires an isotropic z orthogonal to a")]
    BadTransvection,
    #[error("isometry does not preserve the line spanned by the given vector")]
    LineNotPreserved,
    #[error("isometry does not act as +/-1 on the discriminant group or reverses orientation; extension impossible")]
    NotInW,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown lattice name: {0}")]
    UnknownLattice(String),
    #[error("word is not evaluable: {0}")]
    BadWord(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

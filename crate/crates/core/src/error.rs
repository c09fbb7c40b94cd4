use thiserror::Error;

use crate::identities::Relation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: at least {min} required")]
    InvalidDimension { dim: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} = {value} is out of range (limit {limit})")]
    OutOfRange { what: &'static str, value: f64, limit: f64 },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("ragged or non-square input: {0}")]
    Shape(String),

    #[error("truncation tail {tail:.3e} exceeds tolerance at dim {dim}; use dim >= {suggested_dim}")]
    Truncation { tail: f64, dim: usize, suggested_dim: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} deviates from 1")]
    TraceDefect { trace: f64 },

    #[error("operator pair carries relation {found:?}, operation needs {expected:?}")]
    WrongRelation { expected: Relation, found: Relation },

    #[error("operator pair violates its relation: residual {residual:.3e}")]
    RelationViolated { residual: f64 },

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("series `{what}` did not converge within {terms} terms")]
    SeriesTruncation { what: &'static str, terms: usize },

    #[error("integration failed at t = {time}: {detail}; reduce dt or raise dim")]
    IntegrationFailure { time: f64, detail: String },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("position grid is not symmetric about 0")]
    AsymmetricGrid,

    #[error("position grid is not uniform")]
    NonUniformGrid,

    #[error("grid spacing {spacing} too coarse for order {order}: need <= {limit}")]
    ResolutionGuard { spacing: f64, limit: f64, order: usize },

    #[error("wave function leaks past the grid edge: norm {norm}")]
    Extent { norm: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), reason: reason.into() }
    }
}

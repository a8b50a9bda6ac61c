use thiserror::Error;

/// Errors raised by the symbolic and numeric layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("coordinate `{0}` is not in the chart")]
    NotInChart(String),

    #[error("chart mismatch: expected [{expected}], found [{found}]")]
    ChartMismatch { expected: String, found: String },

    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,

    #[error("missing value for coordinate `{0}`")]
    MissingCoordinate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),

    #[error("odd dimension {0}: no symplectic inverse exists")]
    OddDimension(usize),

    #[error("matrix is identically singular")]
    Singular,

    #[error("structure constants violate the Jacobi identity")]
    JacobiViolated,

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("unsupported group `{0}`")]
    UnsupportedGroup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite state at step {0}")]
    NonFinite(usize),

    #[error("implicit solver did not converge at step {0}")]
    NoConvergence(usize),

    #[error("lift pairs project to different quotient vectors (discrepancy {0:e})")]
    ProjectionMismatch(f64),

    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

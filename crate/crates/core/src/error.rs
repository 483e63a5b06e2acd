use thiserror::Error;

/// Errors raised by the geometric and arithmetic routines.
///
/// Every variant maps to a stable name (see [`Error::name`]) which the CLI
/// reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("halfspace region is unbounded")]
    UnboundedRegion,
    #[error("halfspace region is empty")]
    EmptyRegion,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("negative height {0}")]
    NegativeHeight(String),
    #[error("point {0} lies outside the domain")]
    PointOutsideDomain(String),
    #[error("no height given for domain vertex {0}")]
    MissingVertexHeight(String),
    #[error("fan is not complete")]
    NotComplete,
    #[error("incompatible fan: {0}")]
    IncompatibleFan(String),
    #[error("degree table assigns a nonzero value to {0}, which contains [inf]^2")]
    InfinitySquared(String),
    #[error("degree table has no entry for top-degree monomial {0}")]
    MissingTableEntry(String),
    #[error("grade mismatch: {0}")]
    GradeMismatch(String),
    #[error("element is not of top degree {expected} (grade {got})")]
    NotTopDegree { expected: u32, got: u32 },
    #[error("matrix is not positive semidefinite")]
    NotPSD,
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("arity mismatch: form has arity {form}, requested {requested}")]
    ArityMismatch { form: usize, requested: usize },
    #[error("wrong arity: expected {expected} parts, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("unknown ray {0}")]
    UnknownRay(String),
    #[error("oracle is not concave")]
    NonConcaveOracle,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("height routes disagree: okounkov {okounkov}, bkk {bkk}")]
    InconsistentRoutes { okounkov: String, bkk: String },
    #[error("place weights disagree at place {0}")]
    WeightMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable identifier used in CLI error responses.
    pub fn name(&self) -> &'static str {
        match self {
            Error::UnboundedRegion => "UnboundedRegion",
            Error::EmptyRegion => "EmptyRegion",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadDimension(_) => "BadDimension",
            Error::NotFullDimensional => "NotFullDimensional",
            Error::NegativeHeight(_) => "NegativeHeight",
            Error::PointOutsideDomain(_) => "PointOutsideDomain",
            Error::MissingVertexHeight(_) => "MissingVertexHeight",
            Error::NotComplete => "NotComplete",
            Error::IncompatibleFan(_) => "IncompatibleFan",
            Error::InfinitySquared(_) => "InfinitySquared",
            Error::MissingTableEntry(_) => "MissingTableEntry",
            Error::GradeMismatch(_) => "GradeMismatch",
            Error::NotTopDegree { .. } => "NotTopDegree",
            Error::NotPSD => "NotPSD",
            Error::BadDimensions(_) => "BadDimensions",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::WrongArity { .. } => "WrongArity",
            Error::UnknownRay(_) => "UnknownRay",
            Error::NonConcaveOracle => "NonConcaveOracle",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::InconsistentRoutes { .. } => "InconsistentRoutes",
            Error::WeightMismatch(_) => "WeightMismatch",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

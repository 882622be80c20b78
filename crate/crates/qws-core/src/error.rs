use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid shift permutation at arc {arc}: {reason}")]
    InvalidPermutation { arc: usize, reason: String },

    #[error("one-form is not antisymmetric at arc {arc}")]
    NotAntisymmetric { arc: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SpectrumViolation at vertex {vertex}: coin is not unitary (residual {residual:.3e})")]
    NotUnitary { vertex: usize, residual: f64 },

    #[error("invalid coin certificate: {0}")]
    InvalidCertificate(String),

    #[error("SpectrumViolation at vertex {vertex}: eigenvalue {re:.6}{im:+.6}i is near neither kappa nor kappa_prime")]
    SpectrumViolation { vertex: usize, re: f64, im: f64 },

    #[error("MultiplicityViolation at vertex {vertex}: kappa-eigenspace has dimension {found}, expected {expected}")]
    MultiplicityViolation {
        vertex: usize,
        found: usize,
        expected: usize,
    },

    #[error("invalid kernel basis at vertex {vertex}: {reason}")]
    InvalidKernelBasis { vertex: usize, reason: String },

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("eigenvalue {0} lies outside [-1, 1]")]
    EigenvalueOutOfRange(f64),

    #[error("inconsistent lift: {0}")]
    InconsistentLift(String),

    #[error("lifted eigenvector vanished for mu = {mu}")]
    ZeroLift { mu: f64 },

    #[error("lifted eigenvector residual {residual:.3e} exceeds tolerance for mu = {mu}")]
    LiftResidual { mu: f64, residual: f64 },

    #[error("dense spectrum cap exceeded: dimension {size} > cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("unsupported shift: {0}")]
    UnsupportedShift(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("verification failed at k = {k:?}: {reason}")]
    RowVerification { k: Vec<f64>, reason: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    SpecViolation,
    OracleMismatch,
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Input(_) => ErrorClass::Io,
            Error::OracleMismatch(_)
            | Error::RowVerification { .. }
            | Error::LiftResidual { .. }
            | Error::ZeroLift { .. }
            | Error::Consistency(_)
            | Error::Decomposition(_) => ErrorClass::OracleMismatch,
            Error::Context { source, .. } => source.class(),
            _ => ErrorClass::SpecViolation,
        }
    }
}

pub trait ResultExt<T> {
    fn context(self, context: impl Into<String>) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, context: impl Into<String>) -> Result<T> {
        self.map_err(|e| e.context(context))
    }
}

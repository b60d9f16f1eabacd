use thiserror::Error;

/// Errors raised across the crate.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`])
/// which the command-line front end reports in its `{"error": ..}` payload.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar kind mismatch: {left} vs {right}")]
    ScalarKindMismatch { left: &'static str, right: &'static str },

    #[error("inconsistent subsystem shape: {0}")]
    InvalidShape(String),

    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("trace {trace} differs from 1")]
    NotNormalised { trace: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("matrix is not positive (semi)definite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("eigendecomposition did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not a tree")]
    NotATree,

    #[error("overlapping or invalid subsystem split: {0}")]
    InvalidSplit(String),

    #[error("invalid Pauli word: {0}")]
    InvalidPauli(String),

    #[error("invalid stabiliser group: {0}")]
    InvalidStabilizer(String),

    #[error("dense realisation requires Y-free Pauli words")]
    YNotSupported,

    #[error("incompatible marginals: {0}")]
    IncompatibleMarginals(String),

    #[error("singular marginal: {0}")]
    SingularMarginal(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("non-generic point: {0}")]
    NonGeneric(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("rank decision unstable: gap ratio {gap_ratio:.3} below {required}")]
    UnstableRank { gap_ratio: f64, required: f64 },

    #[error("arity mismatch: polynomial has {expected} variables, point has {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("degree bound {bound} insufficient: witness {witness}")]
    DegreeBoundInsufficient { bound: u32, witness: String },

    #[error("support condition violated: {0}")]
    SupportViolation(String),

    #[error("Newton iteration did not converge within {iterations} iterations (residual {residual:e})")]
    NewtonNoConvergence { iterations: usize, residual: f64 },

    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::ScalarKindMismatch { .. } => "scalar_kind_mismatch",
            Error::InvalidShape(_) => "invalid_shape",
            Error::NotSymmetric(_) => "not_symmetric",
            Error::NotNormalised { .. } => "not_normalised",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonFinite => "non_finite",
            Error::NotPositive { .. } => "not_positive",
            Error::NoConvergence { .. } => "no_convergence",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::NotATree => "not_a_tree",
            Error::InvalidSplit(_) => "invalid_split",
            Error::InvalidPauli(_) => "invalid_pauli",
            Error::InvalidStabilizer(_) => "invalid_stabilizer",
            Error::YNotSupported => "y_not_supported",
            Error::IncompatibleMarginals(_) => "incompatible_marginals",
            Error::SingularMarginal(_) => "singular_marginal",
            Error::DegenerateSample(_) => "degenerate_sample",
            Error::NonGeneric(_) => "non_generic",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::UnstableRank { .. } => "unstable_rank",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::DegreeBoundInsufficient { .. } => "degree_bound_insufficient",
            Error::SupportViolation(_) => "support_violation",
            Error::NewtonNoConvergence { .. } => "newton_no_convergence",
            Error::CertificateFailed(_) => "certificate_failed",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library.
///
/// Indices carried by variants are zero-based; the `Display` output is
/// one-based to match the usual mathematical labelling of points and
/// coordinates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent p = {0} is outside the supported range")]
    InvalidExponent(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("points {} and {} tie in coordinate {}", .i + 1, .j + 1, .k + 1)]
    DegenerateTie { i: usize, j: usize, k: usize },

    #[error("point {} is linearly dependent on the preceding points", .index + 1)]
    LinearDependence { index: usize },

    #[error("base configuration is not in G: Jacobian rank {rank}, need {required}")]
    NotInG { rank: usize, required: usize },

    #[error("configuration does not have Property K")]
    PropertyKFailed,

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("dimension folding failed for every N; best residual {best_residual:e}")]
    FoldingFailure { best_residual: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(
        "perturbation cap {cap:e} is below the fixed-point bound {bound:e}; delta is too large for this configuration"
    )]
    Capacity { bound: f64, cap: f64 },

    #[error("invalid norm oracle: {0}")]
    InvalidOracle(String),

    #[error("endpoints lie in different components: sgn(x_{}^{} - x_{}^{}) differs", .i + 1, .k + 1, .j + 1, .k + 1)]
    ComponentMismatch { i: usize, j: usize, k: usize },

    #[error("degenerate line probe: {0}")]
    DegenerateProbe(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::FoldingFailure { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

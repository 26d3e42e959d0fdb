//! Crate-wide error type.

/// Errors produced by the solvers, closures and training loop.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The exact free-streaming closure divides by 3 n_2 - n_0, which
    /// vanishes at isotropic states.
    #[error("singular closure: |3 n2 - n0| = {denom:.3e} is below eps = {eps:.3e}")]
    SingularClosure { denom: f64, eps: f64 },

    /// LGNM ratio features are undefined when the density is at vacuum level.
    #[error("degenerate density: m0 = {m0:.3e} is at or below the floor {floor:.3e}")]
    DegenerateDensity { m0: f64, floor: f64 },

    #[error("numerical blowup at t = {time:.6e} (component {component}, cell {cell})")]
    NumericalBlowup {
        time: f64,
        component: usize,
        cell: usize,
    },

    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error("undefined metric: reference has zero norm")]
    UndefinedMetric,

    #[error("eigenvalue iteration did not converge")]
    EigenFailed,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for `Err(Error::InvalidArgument(...))` construction.
pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

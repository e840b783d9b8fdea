use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no positive equilibrium: reproduction number {reproduction:.6} <= 1")]
    NoPositiveEquilibrium { reproduction: f64 },

    #[error("undetermined: {0}")]
    Undetermined(String),

    #[error(
        "{solver} did not converge after {iterations} iterations (last change {last_change:.3e})"
    )]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        last_change: f64,
        /// Last iterate, when the solver has one worth reporting.
        last_iterate: Option<Vec<f64>>,
    },

    /// Explicit time stepping produced a value that should be impossible for
    /// the continuous problem.
    #[error("time step failure at t={t:.6}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("no threshold: {0}")]
    NoThreshold(String),

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("wrong mode: {0}")]
    WrongMode(String),

    /// The semi-wave speed iteration ran past the speed cap.
    #[error("speed escape: speed iterate reached {speed:.3e}")]
    SpeedEscape { speed: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidParameter(msg.into())
    }

    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoPositiveEquilibrium { .. } => "no_positive_equilibrium",
            Error::Undetermined(_) => "undetermined",
            Error::NonConvergence { .. } => "non_convergence",
            Error::StepFailure { .. } => "step_failure",
            Error::NoThreshold(_) => "no_threshold",
            Error::BracketFailure(_) => "bracket_failure",
            Error::Precondition(_) => "precondition",
            Error::WrongMode(_) => "wrong_mode",
            Error::SpeedEscape { .. } => "speed_escape",
        }
    }

    /// Whether the error comes from input validation rather than a solver.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Precondition(_) | Error::WrongMode(_)
        )
    }
}

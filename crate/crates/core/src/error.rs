use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is valid only under a stronger assumption than the
    /// inputs satisfy (e.g. symmetric rates for closed-form solutions).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A truncated series did not settle when its order was doubled.
    #[error("lattice sum not converged: {what} changed by {rel_change:.3e} (relative) on doubling the truncation")]
    NotConverged { what: String, rel_change: f64 },

    #[error("adaptive step size underflow at t = {t:.6e} s (h = {h:.3e} s)")]
    StepUnderflow { t: f64, h: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::StepUnderflow { .. }
        )
    }
}

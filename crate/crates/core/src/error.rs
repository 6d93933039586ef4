use thiserror::Error;

/// Errors produced by the servoing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid saturation limits on axis {axis}: need u_min < 0 < u_max, got [{u_min}, {u_max}]")]
    InvalidLimits { axis: usize, u_min: f64, u_max: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("equilibrium solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("time step changed mid-run: {previous} -> {current}")]
    TimeStepChanged { previous: f64, current: f64 },

    /// Configuration problem; `line` is 1-based, 0 when not tied to a line.
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

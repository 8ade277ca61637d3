use thiserror::Error;

/// Errors produced by parameter validation and the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a model invariant.
    #[error("invalid {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// A value fell outside its admissible interval.
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// The exponent scan bottomed out at the boundary of the search
    /// interval, so no interior optimum exists for these bounds.
    #[error(
        "approximation error is minimized at the scan endpoint gamma = {gamma}; \
             the payoff bounds admit no interior exponent in the search range"
    )]
    EndpointMinimum { gamma: f64 },

    /// Incompatible time grids between a policy and a simulation.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects non-finite values with the offending parameter name.
pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}

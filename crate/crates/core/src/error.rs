use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation at k_max = {k_max} leaves tail mass {tail:e} (limit {limit:e}); raise k_max")]
    TailMassTooLarge { k_max: usize, tail: f64, limit: f64 },

    #[error("exact enumeration needs more than {limit} configurations; use the Monte Carlo method")]
    EnumerationTooLarge { limit: u64 },

    #[error("adaptive quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, error {error:e}")]
    QuadratureNotConverged { lower: f64, upper: f64, estimate: f64, error: f64 },

    #[error("empirical cdf requested from an empty sample set")]
    EmptySamples,

    #[error("window of radius {radius} produced no access point after {attempts} attempts")]
    DegenerateRealization { radius: f64, attempts: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

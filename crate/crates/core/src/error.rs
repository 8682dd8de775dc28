use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("critical temperature is required to convert a T/Tc fraction")]
    MissingCriticalTemperature,

    #[error("Bose occupation diverges at zero energy and finite temperature")]
    DivergentOccupation,

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error_estimate:e})")]
    QuadratureNotConverged {
        subdivisions: usize,
        value: f64,
        error_estimate: f64,
    },

    #[error("degenerate search interval [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("time grid must start at 0 and be strictly increasing")]
    InvalidTimeGrid,

    #[error("population never crossed the threshold before t = {horizon:e} s")]
    NoCrossing { horizon: f64 },

    #[error("decay rate is zero; storage time is unbounded")]
    InfiniteStorage,

    #[error("integrator step size underflow at t = {t:e}")]
    StepSizeUnderflow { t: f64 },

    #[error("integrator exceeded {steps} steps at t = {t:e}")]
    StepLimit { steps: usize, t: f64 },

    #[error("photon number {n} exceeds the oracle limit of {max}")]
    PhotonNumberTooLarge { n: usize, max: usize },

    #[error("density-matrix trace drifted by {drift:e}")]
    TraceDrift { drift: f64 },
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

//! Collisional decoherence of stored light in a Bose-Einstein condensate.
//!
//! [`gas`] and [`rates`] compute the Beliaev and Landau decay rates of a
//! momentum-tagged excitation; [`dynamics`] evolves the three-mode dark-state
//! system those rates feed into, with [`lindblad`] as an exact small-n check.

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod gas;
pub mod lindblad;
pub mod ode;
pub mod propagator;
pub mod quadrature;
pub mod rates;

pub use dynamics::{CouplingConfig, EvolutionResult, MomentMatrix, Ramp, RampShape};
pub use error::{Error, Result};
pub use gas::{CondensateParams, ReducedPoint, Temperature};
pub use rates::{QuadratureSettings, RateBreakdown};

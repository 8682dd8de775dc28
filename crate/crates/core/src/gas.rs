//! Homogeneous condensate parameters, the dimensionless representation used
//! by the rate integrals, the Bogoliubov dispersion and thermal occupations.
//!
//! Energies are measured in units of the chemical potential `mu`, momenta in
//! units of the healing wavenumber `k0`, and temperatures as `k_B T / mu`.

use std::f64::consts::PI;

use crate::constants::{Isotope, HBAR, K_B};
use crate::error::{require_non_negative, require_positive, Error, Result};

/// Physical constants of the gas. All quantities are SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateParams {
    scattering_length: f64,
    atom_mass: f64,
    density: f64,
    critical_temp: Option<f64>,
    level_splitting: f64,
}

impl CondensateParams {
    /// `level_splitting` is the internal-level splitting `eps_CB / hbar` in rad/s.
    pub fn new(
        scattering_length: f64,
        atom_mass: f64,
        density: f64,
        critical_temp: Option<f64>,
        level_splitting: f64,
    ) -> Result<Self> {
        require_positive("scattering_length", scattering_length)?;
        require_positive("atom_mass", atom_mass)?;
        require_positive("density", density)?;
        if let Some(tc) = critical_temp {
            require_positive("critical_temp", tc)?;
        }
        require_positive("level_splitting", level_splitting)?;
        Ok(Self {
            scattering_length,
            atom_mass,
            density,
            critical_temp,
            level_splitting,
        })
    }

    /// Sodium condensate of the 1999 slow-light experiment: a = 2.8 nm,
    /// n0 = 8e13 cm^-3, Tc = 435 nK, eps_CB/hbar = 2pi x 1.8 GHz.
    pub fn hau1999() -> Self {
        Self::new(
            2.8e-9,
            Isotope::Na23.mass_kg(),
            8.0e19,
            Some(435e-9),
            2.0 * PI * 1.8e9,
        )
        .expect("preset parameters are valid")
    }

    pub fn scattering_length(&self) -> f64 {
        self.scattering_length
    }

    pub fn atom_mass(&self) -> f64 {
        self.atom_mass
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn critical_temp(&self) -> Option<f64> {
        self.critical_temp
    }

    pub fn level_splitting(&self) -> f64 {
        self.level_splitting
    }

    pub fn with_scattering_length(self, a: f64) -> Result<Self> {
        Self::new(a, self.atom_mass, self.density, self.critical_temp, self.level_splitting)
    }

    pub fn with_density(self, n0: f64) -> Result<Self> {
        Self::new(self.scattering_length, self.atom_mass, n0, self.critical_temp, self.level_splitting)
    }

    pub fn with_level_splitting(self, eps_cb: f64) -> Result<Self> {
        Self::new(self.scattering_length, self.atom_mass, self.density, self.critical_temp, eps_cb)
    }

    /// Healing wavenumber `k0 = sqrt(8 pi n0 a)` in 1/m.
    pub fn healing_wavenumber(&self) -> f64 {
        healing_wavenumber(self)
    }

    /// Chemical potential `mu = (hbar k0)^2 / 2m` in joules.
    pub fn chemical_potential(&self) -> f64 {
        let hk = HBAR * self.healing_wavenumber();
        hk * hk / (2.0 * self.atom_mass)
    }

    /// `omega0 = mu / hbar` in rad/s.
    pub fn omega0(&self) -> f64 {
        self.chemical_potential() / HBAR
    }

    /// Rate prefactor `a omega0 k0` (1/s) multiplying the dimensionless
    /// collision integrals.
    pub fn rate_prefactor(&self) -> f64 {
        self.scattering_length * self.omega0() * self.healing_wavenumber()
    }

    /// Reduced level splitting `z_CB = eps_CB / mu`.
    pub fn reduced_splitting(&self) -> f64 {
        self.level_splitting / self.omega0()
    }
}

/// Healing wavenumber `sqrt(8 pi n0 a)` in 1/m.
pub fn healing_wavenumber(params: &CondensateParams) -> f64 {
    (8.0 * PI * params.density * params.scattering_length).sqrt()
}

/// A temperature given either absolutely or relative to the critical temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Kelvin(f64),
    FractionOfTc(f64),
}

impl Temperature {
    pub fn kelvin(self, params: &CondensateParams) -> Result<f64> {
        let t = match self {
            Temperature::Kelvin(t) => t,
            Temperature::FractionOfTc(f) => {
                let tc = params.critical_temp.ok_or(Error::MissingCriticalTemperature)?;
                f * tc
            }
        };
        require_non_negative("temperature", t)?;
        Ok(t)
    }
}

/// A point in the dimensionless variables of the collision integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    y_k: f64,
    t: f64,
    z_cb: f64,
}

impl ReducedPoint {
    pub fn new(y_k: f64, t: f64, z_cb: f64) -> Result<Self> {
        require_positive("y_k", y_k)?;
        require_non_negative("t", t)?;
        require_positive("z_cb", z_cb)?;
        Ok(Self { y_k, t, z_cb })
    }

    /// Momentum in units of `k0`.
    pub fn y_k(&self) -> f64 {
        self.y_k
    }

    /// Temperature as `k_B T / mu`.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Level splitting as `eps_CB / mu`.
    pub fn z_cb(&self) -> f64 {
        self.z_cb
    }

    /// Free-particle energy of the tagged mode, `y_k^2`.
    pub fn particle_energy(&self) -> f64 {
        self.y_k * self.y_k
    }

    pub fn with_y(self, y_k: f64) -> Result<Self> {
        Self::new(y_k, self.t, self.z_cb)
    }

    pub fn with_z_cb(self, z_cb: f64) -> Result<Self> {
        Self::new(self.y_k, self.t, z_cb)
    }

    /// Wavenumber in 1/m.
    pub fn wavenumber(&self, params: &CondensateParams) -> f64 {
        self.y_k * params.healing_wavenumber()
    }

    /// Temperature in kelvin.
    pub fn temperature(&self, params: &CondensateParams) -> f64 {
        self.t * params.chemical_potential() / K_B
    }
}

/// Converts an SI wavenumber and temperature to the dimensionless point,
/// taking `z_CB` from the parameters.
pub fn reduce(params: &CondensateParams, k: f64, temperature: Temperature) -> Result<ReducedPoint> {
    require_positive("k", k)?;
    let kelvin = temperature.kelvin(params)?;
    ReducedPoint::new(
        k / params.healing_wavenumber(),
        K_B * kelvin / params.chemical_potential(),
        params.reduced_splitting(),
    )
}

/// Like [`reduce`] but with the momentum already in units of `k0`.
pub fn reduce_y(params: &CondensateParams, y_k: f64, temperature: Temperature) -> Result<ReducedPoint> {
    require_positive("y_k", y_k)?;
    reduce(params, y_k * params.healing_wavenumber(), temperature)
}

/// Bogoliubov quasiparticle energy `y sqrt(2 + y^2)` in units of `mu`.
pub fn bogoliubov_energy(y: f64) -> Result<f64> {
    require_non_negative("y", y)?;
    Ok(y * (2.0 + y * y).sqrt())
}

/// Bose-Einstein occupation `1 / (exp(z/t) - 1)`.
///
/// Vanishes at `t = 0` for positive energies. A zero-energy mode at finite
/// temperature is an error rather than an overflow.
pub fn bose_population(z: f64, t: f64) -> Result<f64> {
    require_non_negative("z", z)?;
    require_non_negative("t", t)?;
    if z == 0.0 {
        return Err(Error::DivergentOccupation);
    }
    Ok(occupation(z, t))
}

/// Unchecked occupation for positive `z`; used inside integrands.
#[inline]
pub(crate) fn occupation(z: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    // expm1 overflows to +inf for large z/t, giving exactly 0
    1.0 / (z / t).exp_m1()
}

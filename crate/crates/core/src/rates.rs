//! Collisional decay of a momentum-tagged excitation in internal level C.
//!
//! Two channels contribute. In the Beliaev channel the excitation collides
//! with a condensate atom and splits into a Bogoliubov quasiparticle and a
//! lower-energy C particle. In the Landau channel it absorbs a thermal
//! quasiparticle. Both are written as one-dimensional integrals over the
//! quasiparticle energy `z` (units of `mu`), multiplied by `a omega0 k0 / y_k`.

use std::f64::consts::PI;

use crate::constants::HBAR;
use crate::error::{require_positive, Error, Result};
use crate::gas::{occupation, CondensateParams, ReducedPoint};
use crate::quadrature::{integrate, Integral, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub relative_tolerance: f64,
    /// Absolute tolerance as a fraction of the rate prefactor `a omega0 k0`.
    pub absolute_tolerance_scale: f64,
    /// The Landau integral is cut at `multiplier * max(1, t)`.
    pub landau_cutoff_multiplier: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-9,
            absolute_tolerance_scale: 1e-12,
            landau_cutoff_multiplier: 60.0,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        require_positive("relative_tolerance", self.relative_tolerance)?;
        require_positive("absolute_tolerance_scale", self.absolute_tolerance_scale)?;
        if !(self.landau_cutoff_multiplier >= 10.0 && self.landau_cutoff_multiplier.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "landau_cutoff_multiplier",
                value: self.landau_cutoff_multiplier,
                reason: "must be at least 10",
            });
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    /// Tolerance for the dimensionless integral at momentum `y_k`.
    fn tolerance(&self, y_k: f64) -> Tolerance {
        Tolerance {
            rel: self.relative_tolerance,
            abs: self.absolute_tolerance_scale * y_k,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Treatment of the thermal occupation of the final C-level mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpperOccupation {
    #[default]
    Thermal,
    /// Forces `n_i^C = 0`, the large-splitting limit.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub beliaev: f64,
    pub landau: f64,
    pub total: f64,
    pub point: ReducedPoint,
    pub quadrature_error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRate {
    pub rate: f64,
    pub error_estimate: f64,
}

/// `1 - 1/sqrt(1 + z^2)`, the Bogoliubov coherence factor.
#[inline]
fn coherence_weight(z: f64) -> f64 {
    let r = (1.0 + z * z).sqrt();
    if z < 1e-3 {
        z * z / (r * (1.0 + r))
    } else {
        1.0 - 1.0 / r
    }
}

/// `n(x) - n(x + d)` at temperature `t` without cancellation.
#[inline]
fn occupation_difference(x: f64, d: f64, t: f64) -> f64 {
    let a = x / t;
    let dd = d / t;
    let num = -(-dd).exp_m1();
    let den = a.exp_m1() * -(-(a + dd)).exp_m1();
    num / den
}

fn channel(params: &CondensateParams, pt: &ReducedPoint, integral: Integral, extra_err: f64) -> ChannelRate {
    let scale = params.rate_prefactor() / pt.y_k();
    ChannelRate {
        rate: scale * integral.value,
        error_estimate: scale * (integral.error + extra_err),
    }
}

pub fn beliaev_channel(
    params: &CondensateParams,
    pt: &ReducedPoint,
    q: &QuadratureSettings,
    upper: UpperOccupation,
) -> Result<ChannelRate> {
    q.validate()?;
    let t = pt.t();
    let zk = pt.particle_energy();
    let zcb = pt.z_cb();
    let integrand = |z: f64| {
        let n_c = match upper {
            UpperOccupation::Thermal => occupation(zk + zcb - z, t),
            UpperOccupation::Empty => 0.0,
        };
        coherence_weight(z) * (1.0 + n_c + occupation(z, t))
    };
    // n_i^C peaks at the upper endpoint with width ~ z_CB
    let breaks: Vec<f64> = if t > 0.0 {
        (0..4).map(|j| zk - zcb * 10f64.powi(j)).collect()
    } else {
        Vec::new()
    };
    let integral = integrate(integrand, 0.0, zk, &breaks, &q.tolerance(pt.y_k()))?;
    Ok(channel(params, pt, integral, 0.0))
}

pub fn landau_channel(
    params: &CondensateParams,
    pt: &ReducedPoint,
    q: &QuadratureSettings,
    upper: UpperOccupation,
) -> Result<ChannelRate> {
    q.validate()?;
    let t = pt.t();
    if t == 0.0 {
        return Ok(ChannelRate { rate: 0.0, error_estimate: 0.0 });
    }
    let shift = pt.particle_energy() + pt.z_cb();
    let integrand = |z: f64| {
        let dn = match upper {
            UpperOccupation::Thermal => occupation_difference(z, shift, t),
            UpperOccupation::Empty => occupation(z, t),
        };
        coherence_weight(z) * dn
    };
    let z_max = q.landau_cutoff_multiplier * t.max(1.0);
    // weight <= 1 and n(z) <= e^{-z/t} / (1 - e^{-z_max/t}) beyond the cutoff
    let tail = t * (-z_max / t).exp() / -(-z_max / t).exp_m1();
    let breaks = [0.1 * t, t, 5.0 * t];
    let integral = integrate(integrand, 0.0, z_max, &breaks, &q.tolerance(pt.y_k()))?;
    Ok(channel(params, pt, integral, tail))
}

/// Beliaev decay rate (1/s).
pub fn beliaev_rate(params: &CondensateParams, pt: &ReducedPoint, q: &QuadratureSettings) -> Result<f64> {
    beliaev_channel(params, pt, q, UpperOccupation::Thermal).map(|c| c.rate)
}

/// Landau decay rate (1/s). Exactly zero at zero temperature.
pub fn landau_rate(params: &CondensateParams, pt: &ReducedPoint, q: &QuadratureSettings) -> Result<f64> {
    landau_channel(params, pt, q, UpperOccupation::Thermal).map(|c| c.rate)
}

pub fn total_rate(params: &CondensateParams, pt: &ReducedPoint, q: &QuadratureSettings) -> Result<RateBreakdown> {
    total_rate_with(params, pt, q, UpperOccupation::Thermal)
}

pub fn total_rate_with(
    params: &CondensateParams,
    pt: &ReducedPoint,
    q: &QuadratureSettings,
    upper: UpperOccupation,
) -> Result<RateBreakdown> {
    let b = beliaev_channel(params, pt, q, upper)?;
    let l = landau_channel(params, pt, q, upper)?;
    Ok(RateBreakdown {
        beliaev: b.rate,
        landau: l.rate,
        total: b.rate + l.rate,
        point: *pt,
        quadrature_error_estimate: b.error_estimate + l.error_estimate,
    })
}

/// Zero-temperature rate in closed form,
/// `a omega0 k0 y (1 - ln(y^2 + sqrt(1 + y^4)) / y^2)`.
pub fn rate_t0_closed_form(params: &CondensateParams, y_k: f64) -> Result<f64> {
    require_positive("y_k", y_k)?;
    let u = y_k * y_k;
    // u - asinh(u)
    let excess = if u < 1e-3 {
        let u3 = u * u * u;
        u3 / 6.0 - 3.0 * u3 * u * u / 40.0 + 5.0 * u3 * u3 * u / 112.0
    } else {
        u - u.asinh()
    };
    Ok(params.rate_prefactor() * excess / y_k)
}

/// Classical collision rate `n0 sigma v` with `sigma = 4 pi a^2` and `v = hbar k / m`.
pub fn kinetic_theory_rate(params: &CondensateParams, k: f64) -> Result<f64> {
    require_positive("k", k)?;
    let sigma = 4.0 * PI * params.scattering_length().powi(2);
    Ok(params.density() * sigma * HBAR * k / params.atom_mass())
}

/// Phonon-regime limit of the zero-temperature rate, `hbar k^5 / (96 m pi n0)`.
pub fn low_k_asymptote(params: &CondensateParams, k: f64) -> Result<f64> {
    require_positive("k", k)?;
    Ok(HBAR * k.powi(5) / (96.0 * params.atom_mass() * PI * params.density()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerSettings {
    pub coarse_points: usize,
    pub y_rel_tolerance: f64,
}

impl Default for MinimizerSettings {
    fn default() -> Self {
        Self { coarse_points: 64, y_rel_tolerance: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMinimum {
    pub y_star: f64,
    pub rate: RateBreakdown,
    /// False when the smallest rate on the grid sits at an end of the interval.
    pub interior: bool,
}

/// Minimizes the total rate over `y_k` in `[y_lo, y_hi]` at fixed `t` and `z_CB`.
///
/// A logarithmic grid locates a bracket, which golden-section search then
/// refines in `ln y`.
pub fn minimize_rate_over_k(
    params: &CondensateParams,
    t: f64,
    z_cb: f64,
    (y_lo, y_hi): (f64, f64),
    q: &QuadratureSettings,
    m: &MinimizerSettings,
) -> Result<RateMinimum> {
    if !(y_lo > 0.0 && y_hi > y_lo && y_hi.is_finite()) {
        return Err(Error::DegenerateInterval { lo: y_lo, hi: y_hi });
    }
    let n = m.coarse_points.max(3);
    let base = ReducedPoint::new(y_lo, t, z_cb)?;
    let eval = |y: f64| -> Result<RateBreakdown> { total_rate(params, &base.with_y(y)?, q) };

    let (ln_lo, ln_hi) = (y_lo.ln(), y_hi.ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                y_lo
            } else if i == n - 1 {
                y_hi
            } else {
                (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect();
    let rates = grid.iter().map(|&y| eval(y)).collect::<Result<Vec<_>>>()?;
    let best = rates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total.total_cmp(&b.1.total))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    if best == 0 || best == n - 1 {
        return Ok(RateMinimum { y_star: grid[best], rate: rates[best], interior: false });
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1].ln(), grid[best + 1].ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c.exp())?;
    let mut fd = eval(d.exp())?;
    // interval width in ln y approximates the relative width in y
    while b - a > m.y_rel_tolerance {
        if fc.total < fd.total {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d.exp())?;
        }
    }
    let (y_star, rate) = [(c.exp(), fc), (d.exp(), fd), (grid[best], rates[best])]
        .into_iter()
        .min_by(|x, y| x.1.total.total_cmp(&y.1.total))
        .expect("three candidates");
    Ok(RateMinimum { y_star, rate, interior: true })
}

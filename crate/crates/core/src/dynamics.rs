//! Three-mode dynamics of the probe photon `a`, the excited state `A` and the
//! momentum-tagged excitation `C_k` under EIT conditions.
//!
//! Linear Heisenberg equations `dv/dt = K v` for `v = (A, C_k, a)` propagate
//! the normal-ordered second moments `S_ij = <v_i^dag v_j>` as
//! `S(t) = conj(M) S(0) M^T` with `M = exp(K t)`. Noise operators do not
//! enter normal-ordered moments, so no diffusion term appears.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::ode::{integrate, OdeSettings};
use crate::propagator::{integrate_propagator, propagators, Mat3, PropagationMethod};
use crate::rates::RateBreakdown;

/// Mode index of the excited state `A`.
pub const EXCITED: usize = 0;
/// Mode index of the tagged excitation `C_k`.
pub const ATOMIC: usize = 1;
/// Mode index of the probe photon `a`.
pub const PHOTON: usize = 2;

const THETA_EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    omega: f64,
    g_root_n0: f64,
    gamma_a: f64,
    gamma_c: f64,
    photon_number: f64,
    theta: f64,
    gamma_a_on_excited_state: bool,
}

impl CouplingConfig {
    /// Builds the configuration from the two couplings; `theta` follows from
    /// `tan(theta) = g sqrt(N0) / Omega`.
    pub fn from_couplings(omega: f64, g_root_n0: f64, gamma_a: f64, gamma_c: f64, photon_number: f64) -> Result<Self> {
        require_non_negative("omega", omega)?;
        require_non_negative("g_root_n0", g_root_n0)?;
        require_non_negative("gamma_a", gamma_a)?;
        require_non_negative("gamma_c", gamma_c)?;
        require_non_negative("photon_number", photon_number)?;
        Ok(Self {
            omega,
            g_root_n0,
            gamma_a,
            gamma_c,
            photon_number,
            theta: g_root_n0.atan2(omega),
            gamma_a_on_excited_state: true,
        })
    }

    /// Holds `Omega` fixed and sets `g sqrt(N0) = Omega tan(theta)`. At
    /// `theta = pi/2` the control field is off and `g sqrt(N0)` takes the
    /// value of `omega` instead.
    pub fn from_theta(theta: f64, omega: f64, gamma_a: f64, gamma_c: f64, photon_number: f64) -> Result<Self> {
        check_theta(theta)?;
        require_positive("omega", omega)?;
        let mut cfg = if theta >= FRAC_PI_2 - THETA_EDGE {
            Self::from_couplings(0.0, omega, gamma_a, gamma_c, photon_number)?
        } else {
            Self::from_couplings(omega, omega * theta.tan(), gamma_a, gamma_c, photon_number)?
        };
        cfg.theta = theta.min(FRAC_PI_2);
        Ok(cfg)
    }

    /// Splits a fixed total coupling as `Omega = total cos(theta)`,
    /// `g sqrt(N0) = total sin(theta)`; the bright-mode gap stays constant.
    pub fn from_theta_total(theta: f64, total: f64, gamma_a: f64, gamma_c: f64, photon_number: f64) -> Result<Self> {
        check_theta(theta)?;
        require_non_negative("total_coupling", total)?;
        let theta = theta.min(FRAC_PI_2);
        let (s, c) = if theta >= FRAC_PI_2 - THETA_EDGE { (1.0, 0.0) } else { theta.sin_cos() };
        let mut cfg = Self::from_couplings(total * c, total * s, gamma_a, gamma_c, photon_number)?;
        cfg.theta = theta;
        Ok(cfg)
    }

    pub fn with_gamma_c(mut self, gamma_c: f64) -> Result<Self> {
        require_non_negative("gamma_c", gamma_c)?;
        self.gamma_c = gamma_c;
        Ok(self)
    }

    pub fn with_photon_number(mut self, n: f64) -> Result<Self> {
        require_non_negative("photon_number", n)?;
        self.photon_number = n;
        Ok(self)
    }

    /// Selects whether `gamma_A` damps the excited state `A` (default) or the
    /// photon mode.
    pub fn with_gamma_a_on_excited_state(mut self, on_excited: bool) -> Self {
        self.gamma_a_on_excited_state = on_excited;
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g_root_n0(&self) -> f64 {
        self.g_root_n0
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    pub fn photon_number(&self) -> f64 {
        self.photon_number
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma_a_on_excited_state(&self) -> bool {
        self.gamma_a_on_excited_state
    }

    /// `sqrt(Omega^2 + g^2 N0)`.
    pub fn total_coupling(&self) -> f64 {
        self.omega.hypot(self.g_root_n0)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2 + THETA_EDGE).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "must lie in [0, pi/2]",
        })
    }
}

/// Mode populations at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub excited: f64,
    pub atomic: f64,
    pub photon: f64,
}

impl Populations {
    /// `n_p + n_C`, the quantity protected by the dark state.
    pub fn photon_plus_atomic(&self) -> f64 {
        self.photon + self.atomic
    }

    pub fn total(&self) -> f64 {
        self.excited + self.atomic + self.photon
    }
}

/// Normal-ordered second moments `<v_i^dag v_j>` for `v = (A, C_k, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentMatrix {
    pub matrix: Mat3,
    pub time: f64,
}

impl MomentMatrix {
    pub fn new(matrix: Mat3, time: f64) -> Self {
        Self { matrix, time }
    }

    pub fn populations(&self) -> Populations {
        Populations {
            excited: self.matrix[(EXCITED, EXCITED)].re,
            atomic: self.matrix[(ATOMIC, ATOMIC)].re,
            photon: self.matrix[(PHOTON, PHOTON)].re,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest entry of `S - S^dag` relative to the largest entry of `S`.
    pub fn hermiticity_defect(&self) -> f64 {
        let largest = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if largest == 0.0 {
            return 0.0;
        }
        let diff = self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max) / largest
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `conj(M) S M^T`.
    pub fn propagate(&self, m: &Mat3, time: f64) -> Self {
        Self::new(m.map(|z| z.conj()) * self.matrix * m.transpose(), time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub moments: Vec<MomentMatrix>,
    pub method: PropagationMethod,
}

impl EvolutionResult {
    pub fn populations(&self) -> Vec<Populations> {
        self.moments.iter().map(MomentMatrix::populations).collect()
    }

    /// `n_p + n_C` at each time.
    pub fn photon_plus_atomic(&self) -> Vec<f64> {
        self.moments.iter().map(|m| m.populations().photon_plus_atomic()).collect()
    }
}

/// Moments of the beam-splitter dark state `|D(n, theta)>`: the single mode
/// `cos(theta) a^dag - sin(theta) C^dag` holds all `n` quanta.
pub fn dark_state_moments(cfg: &CouplingConfig) -> MomentMatrix {
    let (s, c) = cfg.theta.sin_cos();
    let (s, c) = if cfg.theta >= FRAC_PI_2 - THETA_EDGE { (1.0, 0.0) } else { (s, c) };
    let u = [0.0, -s, c];
    let n = cfg.photon_number;
    let m = Matrix3::from_fn(|i, j| Complex64::new(n * u[i] * u[j], 0.0));
    MomentMatrix::new(m, 0.0)
}

/// Drift matrix `K` of `dv/dt = K v`.
///
/// `dA/dt = -i Omega C - i g sqrt(N0) a`, `dC/dt = -i Omega A - gamma_C/2 C`
/// and `da/dt = -i g sqrt(N0) A`, with `-gamma_A/2` on the diagonal of the
/// excited state or, if so configured, of the photon.
pub fn drift_matrix(cfg: &CouplingConfig) -> Mat3 {
    let zero = Complex64::new(0.0, 0.0);
    let mut k = Mat3::from_element(zero);
    let om = Complex64::new(0.0, -cfg.omega);
    let g = Complex64::new(0.0, -cfg.g_root_n0);
    k[(EXCITED, ATOMIC)] = om;
    k[(EXCITED, PHOTON)] = g;
    k[(ATOMIC, EXCITED)] = om;
    k[(PHOTON, EXCITED)] = g;
    k[(ATOMIC, ATOMIC)] = Complex64::new(-0.5 * cfg.gamma_c, 0.0);
    let lossy = if cfg.gamma_a_on_excited_state { EXCITED } else { PHOTON };
    k[(lossy, lossy)] += Complex64::new(-0.5 * cfg.gamma_a, 0.0);
    k
}

pub(crate) fn check_time_grid(times: &[f64]) -> Result<()> {
    let ok = !times.is_empty()
        && times[0] >= 0.0
        && times.iter().all(|t| t.is_finite())
        && times.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidTimeGrid)
    }
}

fn moment_ode_settings(scale: f64) -> OdeSettings {
    OdeSettings {
        rtol: 1e-11,
        atol: 1e-14 * scale.max(1e-300),
        ..OdeSettings::default()
    }
}

/// Evolves `s0` under the constant drift `k`, diagonalizing `k` when its
/// eigenbasis is well conditioned.
pub fn evolve_moments(s0: &MomentMatrix, k: &Mat3, times: &[f64]) -> Result<EvolutionResult> {
    check_time_grid(times)?;
    let (ms, method) = propagators(k, times, &moment_ode_settings(s0.trace().abs()))?;
    Ok(EvolutionResult {
        times: times.to_vec(),
        moments: ms.iter().zip(times).map(|(m, &t)| s0.propagate(m, t)).collect(),
        method,
    })
}

/// Same as [`evolve_moments`] but always through the Runge-Kutta integrator.
pub fn evolve_moments_integrated(s0: &MomentMatrix, k: &Mat3, times: &[f64]) -> Result<EvolutionResult> {
    check_time_grid(times)?;
    let ms = integrate_propagator(k, times, &moment_ode_settings(1.0))?;
    Ok(EvolutionResult {
        times: times.to_vec(),
        moments: ms.iter().zip(times).map(|(m, &t)| s0.propagate(m, t)).collect(),
        method: PropagationMethod::Integrator,
    })
}

/// Largest relative difference in `tr S(t)` between the two propagation routes.
pub fn propagation_cross_check(s0: &MomentMatrix, k: &Mat3, times: &[f64]) -> Result<f64> {
    let a = evolve_moments(s0, k, times)?;
    let b = evolve_moments_integrated(s0, k, times)?;
    let scale = s0.trace().abs().max(f64::MIN_POSITIVE);
    Ok(a.moments
        .iter()
        .zip(&b.moments)
        .map(|(x, y)| (x.trace() - y.trace()).abs() / scale)
        .fold(0.0, f64::max))
}

/// First time at which `n_p + n_C` of the evolving dark state drops below
/// `fraction * n`.
pub fn delay_time_tau_d(cfg: &CouplingConfig, fraction: f64) -> Result<f64> {
    require_positive("gamma_c", cfg.gamma_c)?;
    require_positive("photon_number", cfg.photon_number)?;
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "fraction",
            value: fraction,
            reason: "must lie in (0, 1)",
        });
    }
    let s0 = dark_state_moments(cfg);
    let k = drift_matrix(cfg);
    let eig = crate::propagator::EigenPropagator::new(&k);
    let threshold = fraction * cfg.photon_number;
    let settings = moment_ode_settings(cfg.photon_number);
    let excess = |t: f64| -> Result<f64> {
        let m = if eig.is_well_conditioned() {
            eig.at(t)
        } else {
            integrate_propagator(&k, &[t], &settings)?[0]
        };
        Ok(s0.propagate(&m, t).populations().photon_plus_atomic() - threshold)
    };

    let horizon = 1e3 / cfg.gamma_c;
    let mut lo = 0.0;
    let mut hi = 1e-3 / cfg.gamma_c;
    while excess(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if lo > horizon {
            return Err(Error::NoCrossing { horizon });
        }
    }
    // the doubling may have stepped over an earlier crossing
    const SCAN: usize = 64;
    let mut prev = lo;
    for i in 1..=SCAN {
        let t = lo + (hi - lo) * i as f64 / SCAN as f64;
        if excess(t)? < 0.0 {
            lo = prev;
            hi = t;
            break;
        }
        prev = t;
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximum storage time `1 / gamma_C`.
pub fn storage_time_tau_s(rate: &RateBreakdown) -> Result<f64> {
    if rate.total > 0.0 && rate.total.is_finite() {
        Ok(1.0 / rate.total)
    } else if rate.total == 0.0 {
        Err(Error::InfiniteStorage)
    } else {
        Err(Error::InvalidParameter {
            name: "total_rate",
            value: rate.total,
            reason: "must be non-negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSweep {
    pub thetas: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[i][j]` is `n_p + n_C` at `thetas[i]`, `times[j]`.
    pub values: Vec<Vec<f64>>,
}

/// `n_p + n_C` of the dark state over a grid of mixing angles at fixed
/// `Omega`, with `g sqrt(N0) = Omega tan(theta)`.
pub fn theta_sweep(base: &CouplingConfig, thetas: &[f64], times: &[f64]) -> Result<ThetaSweep> {
    check_time_grid(times)?;
    let values = thetas
        .iter()
        .map(|&theta| theta_sweep_row(base, theta, times))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaSweep { thetas: thetas.to_vec(), times: times.to_vec(), values })
}

/// One mixing angle of [`theta_sweep`].
pub fn theta_sweep_row(base: &CouplingConfig, theta: f64, times: &[f64]) -> Result<Vec<f64>> {
    let cfg = CouplingConfig::from_theta(theta, base.omega, base.gamma_a, base.gamma_c, base.photon_number)?
        .with_gamma_a_on_excited_state(base.gamma_a_on_excited_state);
    let evo = evolve_moments(&dark_state_moments(&cfg), &drift_matrix(&cfg), times)?;
    Ok(evo.photon_plus_atomic())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampShape {
    Linear,
    /// `(1 - cos(pi x)) / 2`
    Cosine,
}

impl RampShape {
    fn profile(self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            RampShape::Linear => x,
            RampShape::Cosine => 0.5 * (1.0 - (std::f64::consts::PI * x).cos()),
        }
    }
}

/// Mixing-angle schedule for light storage: `theta` rises from 0 to `pi/2`
/// over `t_on`, holds for `t_hold` and returns to 0 over `t_off`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub t_on: f64,
    pub t_hold: f64,
    pub t_off: f64,
    pub shape: RampShape,
}

impl Ramp {
    pub fn validate(&self) -> Result<()> {
        require_positive("t_on", self.t_on)?;
        require_positive("t_hold", self.t_hold)?;
        require_positive("t_off", self.t_off)
    }

    pub fn duration(&self) -> f64 {
        self.t_on + self.t_hold + self.t_off
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        if t <= self.t_on {
            FRAC_PI_2 * self.shape.profile(t / self.t_on)
        } else if t <= self.t_on + self.t_hold {
            FRAC_PI_2
        } else {
            FRAC_PI_2 * (1.0 - self.shape.profile((t - self.t_on - self.t_hold) / self.t_off))
        }
    }

    /// `int sin^2(theta(t)) dt` over the schedule, the time the excitation
    /// spends exposed to `gamma_C` in the adiabatic limit. Both profiles are
    /// antisymmetric about their midpoint, so each ramp contributes half its
    /// duration.
    pub fn exposure(&self) -> f64 {
        self.t_hold + 0.5 * (self.t_on + self.t_off)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageResult {
    pub evolution: EvolutionResult,
    pub recovered_photons: f64,
}

impl StorageResult {
    pub fn final_populations(&self) -> Populations {
        self.evolution.moments.last().expect("non-empty evolution").populations()
    }
}

/// Stores and retrieves a photon number state by ramping the mixing angle at
/// constant total coupling `sqrt(Omega^2 + g^2 N0)` taken from `cfg`.
///
/// `samples` output points are recorded per ramp segment.
pub fn storage_protocol(cfg: &CouplingConfig, ramp: &Ramp, samples: usize) -> Result<StorageResult> {
    ramp.validate()?;
    let total = cfg.total_coupling();
    require_positive("total_coupling", total)?;
    let samples = samples.max(2);
    let at = |theta: f64| -> Result<CouplingConfig> {
        Ok(CouplingConfig::from_theta_total(theta, total, cfg.gamma_a, cfg.gamma_c, cfg.photon_number)?
            .with_gamma_a_on_excited_state(cfg.gamma_a_on_excited_state))
    };
    let s0 = dark_state_moments(&at(0.0)?);
    let settings = moment_ode_settings(cfg.photon_number);

    let mut times = vec![0.0];
    let mut moments = vec![s0];
    let mut method = PropagationMethod::Integrator;

    let segment = |start: f64, len: f64| -> Vec<f64> {
        (1..=samples).map(|i| start + len * i as f64 / samples as f64).collect()
    };

    let ramp_segment = |start: f64, len: f64, s: &MomentMatrix| -> Result<Vec<MomentMatrix>> {
        let outs = segment(start, len);
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
            let k = drift_matrix(&at(ramp.theta_at(t)).expect("theta within range"));
            let s = unpack(y);
            let ds = k.map(|z| z.conj()) * s + s * k.transpose();
            pack(&ds, dy);
        };
        let mut y0 = [0.0; 18];
        pack(&s.matrix, &mut y0);
        let states = integrate(rhs, start, &y0, &outs, &settings)?;
        Ok(states.iter().zip(&outs).map(|(y, &t)| MomentMatrix::new(unpack(y), t)).collect())
    };

    let on = ramp_segment(0.0, ramp.t_on, &s0)?;
    let s_on = *on.last().expect("samples >= 2");
    times.extend(on.iter().map(|m| m.time));
    moments.extend(on);

    let hold_cfg = at(FRAC_PI_2)?;
    let hold_times: Vec<f64> = segment(0.0, ramp.t_hold);
    let (ms, hold_method) = propagators(&drift_matrix(&hold_cfg), &hold_times, &settings)?;
    if hold_method == PropagationMethod::Eigen {
        method = PropagationMethod::Eigen;
    }
    let hold: Vec<MomentMatrix> = ms
        .iter()
        .zip(&hold_times)
        .map(|(m, &dt)| s_on.propagate(m, ramp.t_on + dt))
        .collect();
    let s_hold = *hold.last().expect("samples >= 2");
    times.extend(hold.iter().map(|m| m.time));
    moments.extend(hold);

    let off = ramp_segment(ramp.t_on + ramp.t_hold, ramp.t_off, &s_hold)?;
    times.extend(off.iter().map(|m| m.time));
    moments.extend(off);

    let recovered_photons = moments.last().expect("non-empty").populations().photon;
    Ok(StorageResult {
        evolution: EvolutionResult { times, moments, method },
        recovered_photons,
    })
}

fn pack(m: &Mat3, out: &mut [f64]) {
    for (i, z) in m.iter().enumerate() {
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
}

fn unpack(v: &[f64]) -> Mat3 {
    Mat3::from_iterator((0..9).map(|i| Complex64::new(v[2 * i], v[2 * i + 1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::ReducedPoint;
    use std::f64::consts::{FRAC_PI_4, PI};

    const TWO_PI: f64 = 2.0 * PI;

    fn slow_light(gamma_c: f64) -> CouplingConfig {
        CouplingConfig::from_couplings(TWO_PI * 5.61e6, TWO_PI * 10e6, TWO_PI * 10e6, gamma_c, 3e4).unwrap()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn dark_state_limits() {
        let cfg = CouplingConfig::from_theta(0.0, 1.0, 0.0, 0.0, 5.0).unwrap();
        let p = dark_state_moments(&cfg).populations();
        assert_eq!((p.excited, p.atomic, p.photon), (0.0, 0.0, 5.0));
        let cfg = CouplingConfig::from_theta(FRAC_PI_2, 1.0, 0.0, 0.0, 5.0).unwrap();
        let s = dark_state_moments(&cfg);
        assert_eq!(s.populations().atomic, 5.0);
        assert_eq!(s.populations().photon, 0.0);
        assert_eq!(cfg.omega(), 0.0);
    }

    #[test]
    fn dark_state_cross_moment_from_fock_construction() {
        // |D> = cos^n sum_m sqrt(n!/(m!(n-m)!)) (-tan)^m |C: m, p: n-m>
        let n = 4usize;
        let theta = FRAC_PI_4;
        let amp: Vec<f64> = (0..=n)
            .map(|m| {
                theta.cos().powi(n as i32)
                    * (factorial(n) / (factorial(m) * factorial(n - m))).sqrt()
                    * (-theta.tan()).powi(m as i32)
            })
            .collect();
        let n_c: f64 = (0..=n).map(|m| m as f64 * amp[m] * amp[m]).sum();
        let n_p: f64 = (0..=n).map(|m| (n - m) as f64 * amp[m] * amp[m]).sum();
        // a^dag C |m, n-m> = sqrt(m) sqrt(n-m+1) |m-1, n-m+1>
        let cross: f64 = (1..=n)
            .map(|m| amp[m - 1] * amp[m] * (m as f64).sqrt() * ((n - m + 1) as f64).sqrt())
            .sum();
        assert!((n_c - 2.0).abs() < 1e-12 && (n_p - 2.0).abs() < 1e-12);
        assert!((cross + 2.0).abs() < 1e-12);

        let cfg = CouplingConfig::from_theta(theta, 1.0, 0.0, 0.0, 4.0).unwrap();
        let s = dark_state_moments(&cfg);
        assert!((s.matrix[(PHOTON, ATOMIC)].re - cross).abs() < 1e-12);
        assert!((s.matrix[(ATOMIC, PHOTON)].re - cross).abs() < 1e-12);
        assert!((s.populations().photon - n_p).abs() < 1e-12);
        for j in 0..3 {
            assert_eq!(s.matrix[(EXCITED, j)].norm(), 0.0);
        }
    }

    #[test]
    fn theta_follows_couplings() {
        let cfg = slow_light(0.0);
        assert!((cfg.theta().tan() - 10.0 / 5.61).abs() < 1e-12 * 10.0 / 5.61);
        let back = CouplingConfig::from_theta(cfg.theta(), cfg.omega(), 0.0, 0.0, 1.0).unwrap();
        assert!((back.g_root_n0() / cfg.g_root_n0() - 1.0).abs() < 1e-12);
        assert!(CouplingConfig::from_theta(2.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(CouplingConfig::from_couplings(-1.0, 1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn drift_structure() {
        let zero = CouplingConfig::from_couplings(0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(drift_matrix(&zero), Mat3::zeros());

        let lossless = CouplingConfig::from_couplings(2.0, 3.0, 0.0, 0.0, 1.0).unwrap();
        let k = drift_matrix(&lossless);
        assert_eq!(k + k.adjoint(), Mat3::zeros());

        let printed = slow_light(10.0).with_gamma_a_on_excited_state(false);
        let k = drift_matrix(&printed);
        assert_eq!(k[(PHOTON, PHOTON)].re, -0.5 * TWO_PI * 10e6);
        assert_eq!(k[(EXCITED, EXCITED)].re, 0.0);
        let k = drift_matrix(&slow_light(10.0));
        assert_eq!(k[(EXCITED, EXCITED)].re, -0.5 * TWO_PI * 10e6);
    }

    #[test]
    fn dark_eigenvalue_near_zero() {
        let cfg = CouplingConfig::from_couplings(TWO_PI * 5.61e6, TWO_PI * 15e6, 0.0, 0.0, 1.0).unwrap();
        let eig = crate::propagator::EigenPropagator::new(&drift_matrix(&cfg));
        let scale = cfg.total_coupling();
        let mut mags: Vec<f64> = eig.eigenvalues().iter().map(|z| z.norm() / scale).collect();
        mags.sort_by(f64::total_cmp);
        assert!(mags[0] < 1e-12);
        assert!((mags[1] - 1.0).abs() < 1e-9 && (mags[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_drift_keeps_moments() {
        let cfg = CouplingConfig::from_couplings(0.0, 0.0, 0.0, 0.0, 3.0).unwrap();
        let s0 = dark_state_moments(&CouplingConfig::from_theta(0.4, 1.0, 0.0, 0.0, 3.0).unwrap());
        let r = evolve_moments(&s0, &drift_matrix(&cfg), &[0.0, 1.0, 10.0]).unwrap();
        for m in &r.moments {
            assert_eq!(m.matrix, s0.matrix);
        }
    }

    #[test]
    fn stored_excitation_decays_exponentially() {
        let gc = 1e3;
        let cfg = CouplingConfig::from_theta(FRAC_PI_2, TWO_PI * 5.61e6, TWO_PI * 10e6, gc, 3e4).unwrap();
        let times: Vec<f64> = (0..10).map(|i| i as f64 * 3e-4).collect();
        let r = evolve_moments(&dark_state_moments(&cfg), &drift_matrix(&cfg), &times).unwrap();
        for (t, v) in times.iter().zip(r.photon_plus_atomic()) {
            assert!((v / (3e4 * (-gc * t).exp()) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn time_grid_validation() {
        let cfg = slow_light(1.0);
        let s0 = dark_state_moments(&cfg);
        let k = drift_matrix(&cfg);
        assert!(evolve_moments(&s0, &k, &[]).is_err());
        assert!(evolve_moments(&s0, &k, &[0.0, 1.0, 1.0]).is_err());
        assert!(evolve_moments(&s0, &k, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn delay_time_edge_cases() {
        let cfg = CouplingConfig::from_theta(FRAC_PI_2, 1e6, 1e6, 50.0, 10.0).unwrap();
        let tau = delay_time_tau_d(&cfg, (-1f64).exp()).unwrap();
        assert!((tau * 50.0 - 1.0).abs() < 1e-6);

        for theta in [0.3, 0.8, 1.2, 1.5] {
            let cfg = CouplingConfig::from_theta(theta, 1e6, 1e6, 100.0, 1.0).unwrap();
            let tau = delay_time_tau_d(&cfg, (-1f64).exp()).unwrap();
            assert!(tau * 100.0 >= 1.0);
        }
        assert!(delay_time_tau_d(&slow_light(0.0), 0.3).is_err());
        let never = CouplingConfig::from_theta(1e-7, 1e6, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(delay_time_tau_d(&never, (-1f64).exp()), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn delay_time_is_inverse_dark_rate() {
        // adiabatic dark-mode decay rate is gamma_C sin^2(theta)
        let cfg = slow_light(1e3);
        let tau = delay_time_tau_d(&cfg, (-1f64).exp()).unwrap();
        let expected = 1.0 + (5.61f64 / 10.0).powi(2);
        assert!((tau * 1e3 / expected - 1.0).abs() < 1e-4, "{}", tau * 1e3);
    }

    #[test]
    fn storage_time_from_rate() {
        let pt = ReducedPoint::new(1.0, 1.0, 1.0).unwrap();
        let rate = |total: f64| RateBreakdown {
            beliaev: total,
            landau: 0.0,
            total,
            point: pt,
            quadrature_error_estimate: 0.0,
        };
        assert!((storage_time_tau_s(&rate(2.0e3)).unwrap() - 0.5e-3).abs() < 1e-15);
        assert!((storage_time_tau_s(&rate(244.0)).unwrap() - 4.1e-3).abs() < 0.01e-3);
        assert_eq!(
            storage_time_tau_s(&rate(488.0)).unwrap(),
            0.5 * storage_time_tau_s(&rate(244.0)).unwrap()
        );
        assert_eq!(storage_time_tau_s(&rate(0.0)), Err(Error::InfiniteStorage));
    }

    #[test]
    fn theta_sweep_shape() {
        let gc = 1e3;
        let base = CouplingConfig::from_couplings(TWO_PI * 5.61e6, 1.0, TWO_PI * 10e6, gc, 3e4).unwrap();
        let thetas: Vec<f64> = (0..50).map(|i| FRAC_PI_2 * i as f64 / 49.0).collect();
        let times = [0.0, 0.5e-3, 1e-3, 3e-3];
        let sweep = theta_sweep(&base, &thetas, &times).unwrap();
        for row in &sweep.values {
            assert!((row[0] / 3e4 - 1.0).abs() < 1e-12);
        }
        for j in 1..times.len() {
            for i in 1..thetas.len() {
                assert!(sweep.values[i][j] <= sweep.values[i - 1][j] * (1.0 + 1e-12));
            }
        }
        let last = sweep.values.last().unwrap();
        assert!((last[2] / (3e4 * (-1.0f64).exp()) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn storage_conserves_quanta_without_loss() {
        let cfg = CouplingConfig::from_couplings(TWO_PI * 5.61e6, TWO_PI * 10e6, 0.0, 0.0, 100.0).unwrap();
        for t_on in [1e-8, 2e-6] {
            let ramp = Ramp { t_on, t_hold: 1e-5, t_off: t_on, shape: RampShape::Linear };
            let r = storage_protocol(&cfg, &ramp, 8).unwrap();
            for m in &r.evolution.moments {
                assert!((m.trace() / 100.0 - 1.0).abs() < 1e-8);
            }
            assert!(r.evolution.times.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn slow_ramp_matches_adiabatic_exposure() {
        let gc = 2e3;
        let cfg = CouplingConfig::from_couplings(TWO_PI * 5.61e6, TWO_PI * 10e6, 0.0, gc, 1.0).unwrap();
        for shape in [RampShape::Linear, RampShape::Cosine] {
            let ramp = Ramp { t_on: 20e-6, t_hold: 1e-3, t_off: 20e-6, shape };
            let r = storage_protocol(&cfg, &ramp, 16).unwrap();
            let expected = (-gc * ramp.exposure()).exp();
            assert!((r.recovered_photons / expected - 1.0).abs() < 0.05, "{shape:?} {}", r.recovered_photons);
            assert!((r.recovered_photons / (-2.0f64).exp() - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn fast_ramp_loses_adiabaticity() {
        let cfg = CouplingConfig::from_couplings(TWO_PI * 5.61e6, TWO_PI * 10e6, TWO_PI * 10e6, 2e3, 1.0).unwrap();
        let omega_max = cfg.total_coupling();
        let slow = Ramp { t_on: 200.0 / omega_max, t_hold: 1e-4, t_off: 200.0 / omega_max, shape: RampShape::Cosine };
        let fast = Ramp { t_on: 0.05 / omega_max, t_hold: 1e-4, t_off: 0.05 / omega_max, shape: RampShape::Cosine };
        let a = storage_protocol(&cfg, &slow, 8).unwrap().recovered_photons;
        let b = storage_protocol(&cfg, &fast, 8).unwrap().recovered_photons;
        assert!(b < a, "fast {b} slow {a}");
    }

    #[test]
    fn ramp_schedule() {
        let ramp = Ramp { t_on: 1.0, t_hold: 2.0, t_off: 1.0, shape: RampShape::Cosine };
        assert_eq!(ramp.theta_at(0.0), 0.0);
        assert!((ramp.theta_at(0.5) - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(ramp.theta_at(2.0), FRAC_PI_2);
        assert!(ramp.theta_at(4.0).abs() < 1e-15);
        // numerical exposure integral
        let n = 200_000;
        let h = ramp.duration() / n as f64;
        let num: f64 = (0..n).map(|i| ramp.theta_at((i as f64 + 0.5) * h).sin().powi(2) * h).sum();
        assert!((num - ramp.exposure()).abs() < 1e-6);
        assert!(Ramp { t_on: 0.0, ..ramp }.validate().is_err());
    }
}

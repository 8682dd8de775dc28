//! Subcommand drivers. Each one turns a [`RunConfig`] into a [`Table`].
//!
//! Scan rows are evaluated on a rayon pool and collected in input order, so
//! the output does not depend on the thread count.

use std::f64::consts::{E, FRAC_PI_2};

use rayon::prelude::*;

use bec_eit::dynamics::{
    dark_state_moments, delay_time_tau_d, drift_matrix, evolve_moments, storage_protocol, storage_time_tau_s,
    theta_sweep_row,
};
use bec_eit::gas::{reduce_y, Temperature};
use bec_eit::rates::{minimize_rate_over_k, total_rate, total_rate_with, MinimizerSettings, UpperOccupation};
use bec_eit::{CondensateParams, CouplingConfig, RateBreakdown, ReducedPoint};

use crate::config::RunConfig;
use crate::error::{config_err, CliError, Result};
use crate::table::{fmt_num, status_text, Table, STATUS_OK};

pub struct Pool {
    inner: rayon::ThreadPool,
}

impl Pool {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        let inner = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
        Ok(Self { inner })
    }

    /// Ordered parallel map.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync,
    {
        self.inner.install(|| items.par_iter().map(&f).collect())
    }
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| match i {
            0 => a,
            _ if i == n - 1 => b,
            _ => (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

fn default_y_grid() -> Vec<f64> {
    logspace(0.01, 10.0, 100)
}

fn point(gas: &CondensateParams, y: f64, t_over_tc: f64, z_cb: f64) -> Result<ReducedPoint> {
    Ok(reduce_y(gas, y, Temperature::FractionOfTc(t_over_tc))?.with_z_cb(z_cb)?)
}

fn rate_cells(r: &RateBreakdown) -> Vec<String> {
    let tau = storage_time_tau_s(r).map(|t| fmt_num(t * 1e3)).unwrap_or_default();
    vec![
        fmt_num(r.beliaev),
        fmt_num(r.landau),
        fmt_num(r.total),
        fmt_num(r.quadrature_error_estimate),
        tau,
    ]
}

/// Decay rates on a (T/Tc, y_k) grid, T-major.
pub fn cmd_rates(cfg: &RunConfig, pool: &Pool) -> Result<Table> {
    let gas = cfg.gas()?;
    let q = cfg.quadrature()?;
    let temps = cfg.require_grid("scan.t_over_tc")?;
    let ys = cfg.require_grid("scan.y")?;
    let z_cb = cfg.single("scan.z_cb")?.unwrap_or(gas.reduced_splitting());

    let mut points = Vec::with_capacity(temps.len() * ys.len());
    for &f in &temps {
        for &y in &ys {
            points.push((f, point(&gas, y, f, z_cb)?));
        }
    }
    let results = pool.map(&points, |(_, pt)| total_rate(&gas, pt, &q));

    let mut table = Table::new(
        "rates",
        &[
            "t_over_tc",
            "temperature_nK",
            "t_reduced",
            "y_k",
            "z_cb",
            "beliaev_per_s",
            "landau_per_s",
            "total_per_s",
            "quad_error_per_s",
            "tau_s_ms",
            "status",
        ],
    );
    for ((f, pt), res) in points.iter().zip(results) {
        let mut row = vec![
            fmt_num(*f),
            fmt_num(pt.temperature(&gas) * 1e9),
            fmt_num(pt.t()),
            fmt_num(pt.y_k()),
            fmt_num(pt.z_cb()),
        ];
        match res {
            Ok(r) => {
                row.extend(rate_cells(&r));
                row.push(STATUS_OK.into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.push(status_text(&e));
            }
        }
        table.push(row);
    }
    Ok(table)
}

/// Rates over a family of level splittings, z_CB-major. The extra column
/// repeats the total with the final C-level mode forced empty.
pub fn cmd_zcb_scan(cfg: &RunConfig, pool: &Pool) -> Result<Table> {
    let gas = cfg.gas()?;
    let q = cfg.quadrature()?;
    let f = cfg.single("scan.t_over_tc")?.unwrap_or(0.1);
    let zs = cfg.grid_or("scan.z_cb", vec![1e-4, 1e-2, 1e2])?;
    let ys = cfg.grid_or("scan.y", default_y_grid())?;

    let mut points = Vec::with_capacity(zs.len() * ys.len());
    for &z in &zs {
        for &y in &ys {
            points.push(point(&gas, y, f, z)?);
        }
    }
    let results = pool.map(&points, |pt| -> bec_eit::Result<(RateBreakdown, f64)> {
        let thermal = total_rate(&gas, pt, &q)?;
        let empty = total_rate_with(&gas, pt, &q, UpperOccupation::Empty)?;
        Ok((thermal, empty.total))
    });

    let mut table = Table::new(
        "zcb-scan",
        &[
            "t_over_tc",
            "z_cb",
            "y_k",
            "beliaev_per_s",
            "landau_per_s",
            "total_per_s",
            "total_empty_upper_per_s",
            "status",
        ],
    );
    for (pt, res) in points.iter().zip(results) {
        let mut row = vec![fmt_num(f), fmt_num(pt.z_cb()), fmt_num(pt.y_k())];
        match res {
            Ok((r, empty)) => {
                row.extend([fmt_num(r.beliaev), fmt_num(r.landau), fmt_num(r.total), fmt_num(empty)]);
                row.push(STATUS_OK.into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 4));
                row.push(status_text(&e));
            }
        }
        table.push(row);
    }
    Ok(table)
}

/// Minimum of the total rate over y_k at each temperature, with a text summary.
pub fn cmd_optimize(cfg: &RunConfig, pool: &Pool) -> Result<(Table, String)> {
    let gas = cfg.gas()?;
    let q = cfg.quadrature()?;
    let temps = cfg.require_grid("scan.t_over_tc")?;
    let z_cb = cfg.single("scan.z_cb")?.unwrap_or(gas.reduced_splitting());
    let lo = cfg.f64_or("scan.y_lo", 0.01)?;
    let hi = cfg.f64_or("scan.y_hi", 10.0)?;
    let m = MinimizerSettings {
        coarse_points: cfg.usize_or("scan.coarse_points", MinimizerSettings::default().coarse_points)?,
        ..MinimizerSettings::default()
    };
    let reduced_t = temps
        .iter()
        .map(|&f| Ok(point(&gas, 1.0, f, z_cb)?.t()))
        .collect::<Result<Vec<f64>>>()?;
    let results = pool.map(&reduced_t, |&t| minimize_rate_over_k(&gas, t, z_cb, (lo, hi), &q, &m));

    let mut table = Table::new(
        "optimize",
        &[
            "t_over_tc",
            "z_cb",
            "y_star",
            "beliaev_per_s",
            "landau_per_s",
            "gamma_min_per_s",
            "tau_s_max_ms",
            "interior_minimum",
            "status",
        ],
    );
    let mut report = format!("minimum decay rate over y_k in [{lo}, {hi}], z_CB = {}\n", fmt_num(z_cb));
    for (f, res) in temps.iter().zip(results) {
        let mut row = vec![fmt_num(*f), fmt_num(z_cb)];
        match res {
            Ok(min) => {
                let tau = storage_time_tau_s(&min.rate).map(|t| t * 1e3);
                row.extend([
                    fmt_num(min.y_star),
                    fmt_num(min.rate.beliaev),
                    fmt_num(min.rate.landau),
                    fmt_num(min.rate.total),
                    tau.as_ref().map(|t| fmt_num(*t)).unwrap_or_default(),
                    min.interior.to_string(),
                    STATUS_OK.into(),
                ]);
                report.push_str(&format!(
                    "  T/Tc = {f}: y* = {}, gamma_min = {} 1/s, tau_s = {} ms ({})\n",
                    fmt_num(min.y_star),
                    fmt_num(min.rate.total),
                    tau.as_ref().map(|t| fmt_num(*t)).unwrap_or_else(|_| "inf".into()),
                    if min.interior { "interior minimum" } else { "minimum at interval boundary" }
                ));
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(status_text(&e));
                report.push_str(&format!("  T/Tc = {f}: failed: {e}\n"));
            }
        }
        table.push(row);
    }
    Ok((table, report))
}

/// `n_p + n_C` of the dark state over a mixing-angle grid, theta-major.
/// `Omega` is held fixed and any configured `g sqrt(N0)` or `theta` is ignored.
pub fn cmd_theta_sweep(cfg: &RunConfig, pool: &Pool) -> Result<Table> {
    let base = CouplingConfig::from_couplings(
        cfg.require_f64("coupling.omega_rad_s")?,
        0.0,
        cfg.require_f64("coupling.gamma_a_per_s")?,
        cfg.gamma_c()?,
        cfg.require_f64("coupling.photons")?,
    )?
    .with_gamma_a_on_excited_state(cfg.bool_or("coupling.gamma_a_on_excited_state", true)?);
    let thetas = match cfg.grid("scan.theta_rad")? {
        Some(g) => g,
        None => {
            let n = cfg.usize_or("scan.theta_points", 50)?;
            if n < 2 {
                return Err(config_err("scan.theta_points must be at least 2"));
            }
            (0..n)
                .map(|i| if i == n - 1 { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / (n - 1) as f64 })
                .collect()
        }
    };
    let times = cfg.times(default_end(base.gamma_c()), 6)?;
    let normalize = cfg.bool_or("scan.normalize", false)?;
    let n = base.photon_number();
    let rows = pool.map(&thetas, |&theta| theta_sweep_row(&base, theta, &times));

    let mut header = vec!["theta_rad", "t_s", "photon_plus_atomic"];
    if normalize {
        header.push("photon_plus_atomic_over_n");
    }
    header.push("status");
    let mut table = Table::new("theta-sweep", &header);
    for (theta, res) in thetas.iter().zip(rows) {
        for (j, t) in times.iter().enumerate() {
            let mut row = vec![fmt_num(*theta), fmt_num(*t)];
            match &res {
                Ok(v) => {
                    row.push(fmt_num(v[j]));
                    if normalize {
                        row.push(if n > 0.0 { fmt_num(v[j] / n) } else { String::new() });
                    }
                    row.push(STATUS_OK.into());
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), header.len() - 3));
                    row.push(status_text(e));
                }
            }
            table.push(row);
        }
    }
    Ok(table)
}

fn default_end(gamma_c: f64) -> f64 {
    if gamma_c > 0.0 {
        3.0 / gamma_c
    } else {
        1e-3
    }
}

/// Time series of the mode populations from the dark state, with the 1/e
/// delay time in a footer record.
pub fn cmd_decay(cfg: &RunConfig) -> Result<Table> {
    let c = cfg.coupling()?;
    let times = cfg.times(default_end(c.gamma_c()), 61)?;
    let fraction = cfg.f64_or("scan.fraction", 1.0 / E)?;
    let evo = evolve_moments(&dark_state_moments(&c), &drift_matrix(&c), &times)?;
    let tau_d = delay_time_tau_d(&c, fraction)?;

    let mut table = Table::new(
        "decay",
        &["t_s", "photon", "atomic", "excited", "photon_plus_atomic", "sum", "status"],
    );
    for (t, p) in times.iter().zip(evo.populations()) {
        table.push(vec![
            fmt_num(*t),
            fmt_num(p.photon),
            fmt_num(p.atomic),
            fmt_num(p.excited),
            fmt_num(p.photon_plus_atomic()),
            fmt_num(p.total()),
            STATUS_OK.into(),
        ]);
    }
    table.footer.push(format!("fraction={}", fmt_num(fraction)));
    table.footer.push(format!("tau_d_s={}", fmt_num(tau_d)));
    table.footer.push(format!("tau_d_times_gamma_c={}", fmt_num(tau_d * c.gamma_c())));
    Ok(table)
}

/// Store-and-retrieve run over the ramp schedule.
pub fn cmd_store(cfg: &RunConfig) -> Result<Table> {
    let c = cfg.coupling()?;
    let ramp = cfg.ramp()?;
    let samples = cfg.usize_or("ramp.samples", 50)?;
    let res = storage_protocol(&c, &ramp, samples)?;

    let mut table = Table::new(
        "store",
        &["t_s", "theta_rad", "photon", "atomic", "excited", "photon_plus_atomic", "sum", "status"],
    );
    for (t, m) in res.evolution.times.iter().zip(&res.evolution.moments) {
        let p = m.populations();
        table.push(vec![
            fmt_num(*t),
            fmt_num(ramp.theta_at(*t)),
            fmt_num(p.photon),
            fmt_num(p.atomic),
            fmt_num(p.excited),
            fmt_num(p.photon_plus_atomic()),
            fmt_num(p.total()),
            STATUS_OK.into(),
        ]);
    }
    let n = c.photon_number();
    table.footer.push(format!("recovered_photons={}", fmt_num(res.recovered_photons)));
    if n > 0.0 {
        table.footer.push(format!("recovered_fraction={}", fmt_num(res.recovered_photons / n)));
    }
    table.footer.push(format!("exposure_s={}", fmt_num(ramp.exposure())));
    table
        .footer
        .push(format!("adiabatic_fraction={}", fmt_num((-c.gamma_c() * ramp.exposure()).exp())));
    Ok(table)
}

//! Flat `key = value` run configuration.
//!
//! Keys carry a section prefix (`gas.`, `coupling.`, `scan.`, `quad.`,
//! `ramp.`, `plot.`). Values are layered: preset, then config file, then
//! command-line overrides. Unknown keys are rejected.
//!
//! Numbers may be prefixed with `2pi*` to give angular frequencies in Hz.
//! Grids are comma-separated lists or `linspace(a, b, n)` / `logspace(a, b, n)`
//! where `logspace` takes the end points themselves, not their logarithms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use bec_eit::constants::Isotope;
use bec_eit::dynamics::{Ramp, RampShape};
use bec_eit::gas::{reduce_y, Temperature};
use bec_eit::rates::total_rate;
use bec_eit::{CondensateParams, CouplingConfig, QuadratureSettings};

use crate::error::{config_err, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "gas.scattering_length_m",
    "gas.mass_kg",
    "gas.isotope",
    "gas.density_m3",
    "gas.tc_k",
    "gas.eps_cb_rad_s",
    "coupling.omega_rad_s",
    "coupling.g_root_n0_rad_s",
    "coupling.theta_rad",
    "coupling.gamma_a_per_s",
    "coupling.gamma_c_per_s",
    "coupling.gamma_c_y_k",
    "coupling.gamma_c_t_over_tc",
    "coupling.photons",
    "coupling.gamma_a_on_excited_state",
    "scan.y",
    "scan.t_over_tc",
    "scan.z_cb",
    "scan.y_lo",
    "scan.y_hi",
    "scan.coarse_points",
    "scan.theta_points",
    "scan.theta_rad",
    "scan.times_s",
    "scan.t_end_s",
    "scan.time_points",
    "scan.normalize",
    "scan.fraction",
    "quad.rtol",
    "quad.atol_scale",
    "quad.landau_cutoff",
    "quad.max_subdivisions",
    "ramp.t_on_s",
    "ramp.t_hold_s",
    "ramp.t_off_s",
    "ramp.shape",
    "ramp.samples",
    "plot.x",
    "plot.y",
    "plot.group",
    "plot.log_x",
    "plot.log_y",
    "plot.title",
];

const GAS_1999: &[(&str, &str)] = &[
    ("gas.scattering_length_m", "2.8e-9"),
    ("gas.isotope", "na23"),
    ("gas.density_m3", "8e19"),
    ("gas.tc_k", "435e-9"),
    ("gas.eps_cb_rad_s", "2pi*1.8e9"),
];

const SLOW_LIGHT_1999: &[(&str, &str)] = &[
    ("coupling.omega_rad_s", "2pi*5.61e6"),
    ("coupling.g_root_n0_rad_s", "2pi*10e6"),
    ("coupling.gamma_a_per_s", "2pi*10e6"),
    ("coupling.gamma_c_per_s", "1e3"),
    ("coupling.photons", "3e4"),
];

const STORAGE_2001: &[(&str, &str)] = &[
    ("coupling.omega_rad_s", "2pi*5.61e6"),
    ("coupling.g_root_n0_rad_s", "2pi*15e6"),
    ("coupling.gamma_a_per_s", "2pi*10e6"),
    ("coupling.gamma_c_per_s", "1e3"),
    ("coupling.photons", "3e4"),
    ("ramp.t_on_s", "2e-6"),
    ("ramp.t_hold_s", "1e-3"),
    ("ramp.t_off_s", "2e-6"),
    ("ramp.shape", "cosine"),
];

/// Layered raw configuration values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply_preset(&mut self, name: &str) -> Result<()> {
        let layers: &[&[(&str, &str)]] = match name {
            "hau1999" => &[GAS_1999, SLOW_LIGHT_1999],
            "hau2001" => &[GAS_1999, STORAGE_2001],
            other => return Err(config_err(format!("unknown preset `{other}` (expected hau1999 or hau2001)"))),
        };
        for layer in layers {
            for (k, v) in layer.iter() {
                self.set(k, v)?;
            }
        }
        Ok(())
    }

    /// Merges `key = value` lines; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("{origin}:{}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| config_err(format!("{origin}:{}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn set_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| config_err(format!("override `{assignment}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(config_err(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(config_err(format!("empty value for `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_number(key, v)).transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| config_err(format!("missing required key `{key}`")))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| config_err(format!("`{key}`: `{v}` is not a non-negative integer"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true") | Some("yes") | Some("1") => Ok(true),
            Some("false") | Some("no") | Some("0") => Ok(false),
            Some(v) => Err(config_err(format!("`{key}`: `{v}` is not a boolean"))),
        }
    }

    /// A strictly increasing, non-empty grid.
    pub fn grid(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let g = parse_grid(key, v)?;
        if g.is_empty() {
            return Err(config_err(format!("`{key}`: grid is empty")));
        }
        if !g.windows(2).all(|w| w[1] > w[0]) {
            return Err(config_err(format!("`{key}`: grid must be strictly increasing")));
        }
        Ok(Some(g))
    }

    pub fn grid_or(&self, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        Ok(self.grid(key)?.unwrap_or(default))
    }

    pub fn require_grid(&self, key: &str) -> Result<Vec<f64>> {
        self.grid(key)?.ok_or_else(|| config_err(format!("missing required key `{key}`")))
    }

    /// A key that holds a grid in other subcommands but must be a single value here.
    pub fn single(&self, key: &str) -> Result<Option<f64>> {
        match self.grid(key)? {
            None => Ok(None),
            Some(g) if g.len() == 1 => Ok(Some(g[0])),
            Some(_) => Err(config_err(format!("`{key}` takes a single value for this subcommand"))),
        }
    }

    /// Output times from `scan.times_s`, or `scan.time_points` evenly spaced
    /// points on `[0, scan.t_end_s]`.
    pub fn times(&self, default_end: f64, default_points: usize) -> Result<Vec<f64>> {
        if let Some(g) = self.grid("scan.times_s")? {
            if self.contains("scan.t_end_s") || self.contains("scan.time_points") {
                return Err(config_err("scan.times_s excludes scan.t_end_s and scan.time_points"));
            }
            if g[0] < 0.0 {
                return Err(config_err("scan.times_s must be non-negative"));
            }
            return Ok(g);
        }
        let end = self.f64_or("scan.t_end_s", default_end)?;
        let n = self.usize_or("scan.time_points", default_points)?;
        if end <= 0.0 || n < 2 {
            return Err(config_err("need scan.t_end_s > 0 and scan.time_points >= 2"));
        }
        spaced("scan.t_end_s", 0.0, end, n, false)
    }

    pub fn gas(&self) -> Result<CondensateParams> {
        let mass = match (self.f64("gas.mass_kg")?, self.raw("gas.isotope")) {
            (Some(_), Some(_)) => return Err(config_err("give either gas.mass_kg or gas.isotope, not both")),
            (Some(m), None) => m,
            (None, Some(name)) => Isotope::from_name(name)
                .ok_or_else(|| config_err(format!("unknown isotope `{name}`")))?
                .mass_kg(),
            (None, None) => return Err(config_err("missing gas.mass_kg or gas.isotope")),
        };
        Ok(CondensateParams::new(
            self.require_f64("gas.scattering_length_m")?,
            mass,
            self.require_f64("gas.density_m3")?,
            self.f64("gas.tc_k")?,
            self.require_f64("gas.eps_cb_rad_s")?,
        )?)
    }

    pub fn quadrature(&self) -> Result<QuadratureSettings> {
        let d = QuadratureSettings::default();
        let q = QuadratureSettings {
            relative_tolerance: self.f64_or("quad.rtol", d.relative_tolerance)?,
            absolute_tolerance_scale: self.f64_or("quad.atol_scale", d.absolute_tolerance_scale)?,
            landau_cutoff_multiplier: self.f64_or("quad.landau_cutoff", d.landau_cutoff_multiplier)?,
            max_subdivisions: self.usize_or("quad.max_subdivisions", d.max_subdivisions)?,
        };
        q.validate()?;
        Ok(q)
    }

    /// The decay rate `gamma_C`, given directly or evaluated from the gas
    /// model at `coupling.gamma_c_y_k` and `coupling.gamma_c_t_over_tc`.
    pub fn gamma_c(&self) -> Result<f64> {
        let y = self.f64("coupling.gamma_c_y_k")?;
        let frac = self.f64("coupling.gamma_c_t_over_tc")?;
        match (y, frac) {
            (None, None) => self.require_f64("coupling.gamma_c_per_s"),
            (Some(y), Some(frac)) => {
                // gas-derived rate takes precedence over a preset value
                let gas = self.gas()?;
                let pt = reduce_y(&gas, y, Temperature::FractionOfTc(frac))?;
                Ok(total_rate(&gas, &pt, &self.quadrature()?)?.total)
            }
            _ => Err(config_err(
                "coupling.gamma_c_y_k and coupling.gamma_c_t_over_tc must be given together",
            )),
        }
    }

    pub fn coupling(&self) -> Result<CouplingConfig> {
        let gamma_a = self.require_f64("coupling.gamma_a_per_s")?;
        let gamma_c = self.gamma_c()?;
        let n = self.require_f64("coupling.photons")?;
        let omega = self.f64("coupling.omega_rad_s")?;
        let g = self.f64("coupling.g_root_n0_rad_s")?;
        let theta = self.f64("coupling.theta_rad")?;
        let cfg = match (omega, g, theta) {
            (Some(o), Some(g), None) => CouplingConfig::from_couplings(o, g, gamma_a, gamma_c, n)?,
            (Some(o), None, Some(t)) => CouplingConfig::from_theta(t, o, gamma_a, gamma_c, n)?,
            (Some(o), None, None) => CouplingConfig::from_couplings(o, 0.0, gamma_a, gamma_c, n)?,
            (_, Some(_), Some(_)) => {
                return Err(config_err(
                    "coupling.theta_rad and coupling.g_root_n0_rad_s are mutually exclusive",
                ))
            }
            (None, _, _) => return Err(config_err("missing coupling.omega_rad_s")),
        };
        Ok(cfg.with_gamma_a_on_excited_state(self.bool_or("coupling.gamma_a_on_excited_state", true)?))
    }

    pub fn ramp(&self) -> Result<Ramp> {
        let shape = match self.raw("ramp.shape").unwrap_or("cosine") {
            "linear" => RampShape::Linear,
            "cosine" | "smooth" => RampShape::Cosine,
            other => return Err(config_err(format!("unknown ramp.shape `{other}`"))),
        };
        let ramp = Ramp {
            t_on: self.require_f64("ramp.t_on_s")?,
            t_hold: self.require_f64("ramp.t_hold_s")?,
            t_off: self.require_f64("ramp.t_off_s")?,
            shape,
        };
        ramp.validate()?;
        Ok(ramp)
    }
}

fn parse_number(key: &str, v: &str) -> Result<f64> {
    let (factor, body) = match v.strip_prefix("2pi*") {
        Some(rest) => (2.0 * PI, rest.trim()),
        None => (1.0, v),
    };
    let x: f64 = body
        .parse()
        .map_err(|_| config_err(format!("`{key}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(config_err(format!("`{key}`: `{v}` is not finite")));
    }
    Ok(factor * x)
}

fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    for (name, log) in [("linspace", false), ("logspace", true)] {
        if let Some(args) = v.strip_prefix(name) {
            let inner = args
                .trim()
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| config_err(format!("`{key}`: malformed {name}(...)")))?;
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(config_err(format!("`{key}`: {name} takes (start, end, count)")));
            }
            let a = parse_number(key, parts[0])?;
            let b = parse_number(key, parts[1])?;
            let n: usize = parts[2]
                .parse()
                .map_err(|_| config_err(format!("`{key}`: bad point count `{}`", parts[2])))?;
            return spaced(key, a, b, n, log);
        }
    }
    v.split(',').map(|s| parse_number(key, s.trim())).collect()
}

fn spaced(key: &str, a: f64, b: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(config_err(format!("`{key}`: grid is empty")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    if log && (a <= 0.0 || b <= 0.0) {
        return Err(config_err(format!("`{key}`: logspace end points must be positive")));
    }
    Ok((0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else if log {
                (a.ln() + f * (b.ln() - a.ln())).exp()
            } else {
                a + f * (b - a)
            }
        })
        .collect())
}

//! Browser bindings for the interactive page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layout is given per
//! function. The plain functions behind the exports are public so they can be
//! tested natively.

use std::f64::consts::{FRAC_PI_2, PI};

use wasm_bindgen::prelude::*;

use bec_eit::dynamics::{storage_time_tau_s, theta_sweep_row};
use bec_eit::gas::{reduce_y, Temperature};
use bec_eit::rates::{minimize_rate_over_k, total_rate, MinimizerSettings};
use bec_eit::{CondensateParams, CouplingConfig, QuadratureSettings};

fn gas() -> CondensateParams {
    CondensateParams::hau1999()
}

fn quad() -> QuadratureSettings {
    // looser than the library default; the page redraws on every input event
    QuadratureSettings { relative_tolerance: 1e-6, ..QuadratureSettings::default() }
}

fn z_cb_or_default(z_cb: f64) -> f64 {
    if z_cb > 0.0 {
        z_cb
    } else {
        gas().reduced_splitting()
    }
}

/// Rows of `[y_k, beliaev, landau, total]` (1/s) on a log grid of `points`
/// momenta in `[y_lo, y_hi]`. A non-positive `z_cb` selects the sodium value.
pub fn rate_curve(t_over_tc: f64, z_cb: f64, y_lo: f64, y_hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(y_lo > 0.0 && y_hi > y_lo) || points < 2 {
        return Err("need 0 < y_lo < y_hi and at least two points".into());
    }
    let p = gas();
    let q = quad();
    let z_cb = z_cb_or_default(z_cb);
    let mut out = Vec::with_capacity(4 * points);
    for i in 0..points {
        let y = match i {
            0 => y_lo,
            _ if i == points - 1 => y_hi,
            _ => (y_lo.ln() + (y_hi.ln() - y_lo.ln()) * i as f64 / (points - 1) as f64).exp(),
        };
        let pt = reduce_y(&p, y, Temperature::FractionOfTc(t_over_tc))
            .and_then(|pt| pt.with_z_cb(z_cb))
            .map_err(|e| e.to_string())?;
        let r = total_rate(&p, &pt, &q).map_err(|e| e.to_string())?;
        out.extend([y, r.beliaev, r.landau, r.total]);
    }
    Ok(out)
}

/// `[y_star, gamma_min (1/s), tau_s (ms), interior (0 or 1)]` over `y_k` in `[0.01, 10]`.
pub fn optimum(t_over_tc: f64, z_cb: f64) -> Result<Vec<f64>, String> {
    let p = gas();
    let z_cb = z_cb_or_default(z_cb);
    let t = reduce_y(&p, 1.0, Temperature::FractionOfTc(t_over_tc)).map_err(|e| e.to_string())?.t();
    let m = minimize_rate_over_k(&p, t, z_cb, (0.01, 10.0), &quad(), &MinimizerSettings::default())
        .map_err(|e| e.to_string())?;
    let tau = storage_time_tau_s(&m.rate).map(|s| s * 1e3).unwrap_or(f64::INFINITY);
    Ok(vec![m.y_star, m.rate.total, tau, if m.interior { 1.0 } else { 0.0 }])
}

/// `(n_p + n_C) / n` against mixing angle at time `t_ms`: rows of
/// `[theta, fraction]` on `points` angles in `[0, pi/2]`, with
/// `Omega = (2 pi) 5.61 MHz` and `gamma_A = (2 pi) 10 MHz`.
pub fn dark_fraction(gamma_c: f64, t_ms: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 {
        return Err("need at least two angles".into());
    }
    let base = CouplingConfig::from_couplings(2.0 * PI * 5.61e6, 0.0, 2.0 * PI * 10e6, gamma_c, 1.0)
        .map_err(|e| e.to_string())?;
    let times = [t_ms * 1e-3];
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let theta = if i == points - 1 { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / (points - 1) as f64 };
        let v = theta_sweep_row(&base, theta, &times).map_err(|e| e.to_string())?;
        out.extend([theta, v[0]]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = rateCurve)]
pub fn rate_curve_js(t_over_tc: f64, z_cb: f64, y_lo: f64, y_hi: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    rate_curve(t_over_tc, z_cb, y_lo, y_hi, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = optimum)]
pub fn optimum_js(t_over_tc: f64, z_cb: f64) -> Result<Vec<f64>, JsValue> {
    optimum(t_over_tc, z_cb).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = darkFraction)]
pub fn dark_fraction_js(gamma_c: f64, t_ms: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    dark_fraction(gamma_c, t_ms, points).map_err(|e| JsValue::from_str(&e))
}

/// `[k0 (1/m), mu/hbar (rad/s), z_CB]` of the built-in gas.
#[wasm_bindgen(js_name = gasScales)]
pub fn gas_scales() -> Vec<f64> {
    let p = gas();
    vec![p.healing_wavenumber(), p.omega0(), p.reduced_splitting()]
}

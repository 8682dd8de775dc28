//! Adaptive Dormand-Prince 5(4) integration of real-valued systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-14, max_steps: 50_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `t0` and returns the state at each
/// output time. Output times must be non-decreasing and not before `t0`.
pub fn integrate<F>(f: F, t0: f64, y0: &[f64], outputs: &[f64], s: &OdeSettings) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    f(t, &y, &mut k[0]);

    let mut h = initial_step(&y, &k[0], outputs.last().map_or(1.0, |&e| e - t0), s);
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(outputs.len());

    for &target in outputs {
        if target < t {
            return Err(Error::InvalidTimeGrid);
        }
        while t < target {
            if steps >= s.max_steps {
                return Err(Error::StepLimit { steps, t });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step <= f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) * 4.0 && !last {
                return Err(Error::StepSizeUnderflow { t });
            }

            for stage in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(stage) {
                        acc += step * A[stage][j] * kj[i];
                    }
                    tmp[i] = acc;
                }
                f(t + C[stage] * step, &tmp, &mut k[stage]);
            }
            // stage 7 argument equals the fifth-order solution
            y_new.copy_from_slice(&tmp);

            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                let scale = s.atol + s.rtol * y[i].abs().max(y_new[i].abs());
                let r = step * e / scale;
                err += r * r;
            }
            let err = (err / n.max(1) as f64).sqrt();
            steps += 1;

            if err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                let (first, rest) = k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || grow < 1.0 {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h <= f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) * 4.0 {
                    return Err(Error::StepSizeUnderflow { t });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step(y: &[f64], dy: &[f64], span: f64, s: &OdeSettings) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, di) in y.iter().zip(dy) {
        let sc = s.atol + s.rtol * yi.abs();
        d0 += (yi / sc).powi(2);
        d1 += (di / sc).powi(2);
    }
    let h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 * span } else { 0.01 * (d0 / d1).sqrt() };
    h.min(span.abs()).max(f64::MIN_POSITIVE)
}

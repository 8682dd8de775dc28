//! Propagators `M(t) = exp(K t)` for constant 3x3 complex drift matrices.
//!
//! The primary route diagonalizes `K` through its complex Schur form. The
//! second route integrates `dM/dt = K M` with the Runge-Kutta solver and is
//! used as a cross-check and whenever the eigenbasis is ill-conditioned.

use nalgebra::{Matrix3, Schur};
use num_complex::Complex64;

use crate::error::Result;
use crate::ode::{integrate, OdeSettings};

pub type Mat3 = Matrix3<Complex64>;

/// Eigenbases with a larger condition number are treated as defective.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMethod {
    Eigen,
    Integrator,
}

#[derive(Debug, Clone)]
pub struct EigenPropagator {
    vectors: Mat3,
    inverse: Mat3,
    values: [Complex64; 3],
    condition: f64,
}

impl EigenPropagator {
    pub fn new(k: &Mat3) -> Self {
        let scale = k.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Self {
                vectors: Mat3::identity(),
                inverse: Mat3::identity(),
                values: [Complex64::new(0.0, 0.0); 3],
                condition: 1.0,
            };
        }
        let Some(schur) = Schur::try_new(*k, f64::EPSILON, 10_000) else {
            return Self::defective();
        };
        let (q, t) = schur.unpack();
        let tiny = 1e-13 * scale;

        let mut y = Mat3::zeros();
        for i in 0..3 {
            let lambda = t[(i, i)];
            y[(i, i)] = Complex64::new(1.0, 0.0);
            for j in (0..i).rev() {
                let mut num = Complex64::new(0.0, 0.0);
                for l in j + 1..=i {
                    num += t[(j, l)] * y[(l, i)];
                }
                let den = t[(j, j)] - lambda;
                y[(j, i)] = if den.norm() > tiny {
                    -num / den
                } else if num.norm() <= tiny {
                    Complex64::new(0.0, 0.0)
                } else {
                    // Jordan block: the eigenbasis blows up
                    -num / Complex64::new(tiny * 1e-8, 0.0)
                };
            }
        }
        let mut vectors = q * y;
        for mut col in vectors.column_iter_mut() {
            let norm = col.norm();
            col /= Complex64::new(norm, 0.0);
        }
        let Some(inverse) = vectors.try_inverse() else {
            return Self::defective();
        };
        let condition = vectors.norm() * inverse.norm();
        Self {
            vectors,
            inverse,
            values: [t[(0, 0)], t[(1, 1)], t[(2, 2)]],
            condition: if condition.is_finite() { condition } else { f64::INFINITY },
        }
    }

    fn defective() -> Self {
        Self {
            vectors: Mat3::identity(),
            inverse: Mat3::identity(),
            values: [Complex64::new(0.0, 0.0); 3],
            condition: f64::INFINITY,
        }
    }

    pub fn eigenvalues(&self) -> [Complex64; 3] {
        self.values
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    pub fn is_well_conditioned(&self) -> bool {
        self.condition <= MAX_CONDITION
    }

    pub fn at(&self, t: f64) -> Mat3 {
        let mut scaled = self.vectors;
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= (self.values[j] * t).exp();
        }
        scaled * self.inverse
    }
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

/// Integrates `dM/dt = K M` from the identity and returns `M` at each time.
pub fn integrate_propagator(k: &Mat3, times: &[f64], s: &OdeSettings) -> Result<Vec<Mat3>> {
    let mut y0 = [0.0; 18];
    pack(&Mat3::identity(), &mut y0);
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let m = unpack(y);
        pack(&(k * m), dy);
    };
    let states = integrate(rhs, 0.0, &y0, times, s)?;
    Ok(states.iter().map(|v| unpack(v)).collect())
}

/// Propagators at the requested times, using the eigenbasis when it is well
/// conditioned and the integrator otherwise.
pub fn propagators(k: &Mat3, times: &[f64], s: &OdeSettings) -> Result<(Vec<Mat3>, PropagationMethod)> {
    let eig = EigenPropagator::new(k);
    if eig.is_well_conditioned() {
        Ok((times.iter().map(|&t| eig.at(t)).collect(), PropagationMethod::Eigen))
    } else {
        Ok((integrate_propagator(k, times, s)?, PropagationMethod::Integrator))
    }
}

//! Exact master-equation evolution of the three modes on a truncated Fock
//! space, used to check the moment equations.
//!
//! The Hamiltonian `Omega (A^dag C + C^dag A) + g sqrt(N0) (A^dag a + a^dag A)`
//! conserves the total excitation number and the loss channels only lower it,
//! so the space of states with at most `n` quanta is closed.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::dynamics::{check_time_grid, CouplingConfig, EvolutionResult, MomentMatrix, ATOMIC, EXCITED, PHOTON};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeSettings};
use crate::propagator::PropagationMethod;

pub const MAX_PHOTONS: usize = 4;
const TRACE_TOLERANCE: f64 = 1e-9;

type Op = DMatrix<Complex64>;

struct FockSpace {
    states: Vec<[usize; 3]>,
}

impl FockSpace {
    fn new(n: usize) -> Self {
        let mut states = Vec::new();
        for total in 0..=n {
            for e in 0..=total {
                for c in 0..=total - e {
                    let mut s = [0; 3];
                    s[EXCITED] = e;
                    s[ATOMIC] = c;
                    s[PHOTON] = total - e - c;
                    states.push(s);
                }
            }
        }
        Self { states }
    }

    fn dim(&self) -> usize {
        self.states.len()
    }

    fn index(&self, s: &[usize; 3]) -> usize {
        self.states.iter().position(|x| x == s).expect("state in truncated space")
    }

    fn annihilation(&self, mode: usize) -> Op {
        let d = self.dim();
        let mut op = Op::zeros(d, d);
        for (j, s) in self.states.iter().enumerate() {
            if s[mode] > 0 {
                let mut lower = *s;
                lower[mode] -= 1;
                op[(self.index(&lower), j)] = Complex64::new((s[mode] as f64).sqrt(), 0.0);
            }
        }
        op
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Amplitudes of `|D(n, theta)>` on `|C: m, p: n - m>`, `m = 0..=n`.
pub fn dark_state_amplitudes(n: usize, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    (0..=n)
        .map(|m| binomial(n, m).sqrt() * (-s).powi(m as i32) * c.powi((n - m) as i32))
        .collect()
}

fn photon_count(cfg: &CouplingConfig) -> Result<usize> {
    let n = cfg.photon_number();
    if n.fract() != 0.0 {
        return Err(Error::InvalidParameter {
            name: "photon_number",
            value: n,
            reason: "must be an integer for the Fock-space oracle",
        });
    }
    if n > MAX_PHOTONS as f64 {
        return Err(Error::PhotonNumberTooLarge { n: n as usize, max: MAX_PHOTONS });
    }
    Ok(n as usize)
}

/// Evolves the dark state `|D(n, theta)>` under the master equation and
/// returns the normal-ordered second moments at each time.
pub fn lindblad_oracle(cfg: &CouplingConfig, times: &[f64]) -> Result<EvolutionResult> {
    check_time_grid(times)?;
    let n = photon_count(cfg)?;
    let space = FockSpace::new(n);
    let d = space.dim();
    let ops: Vec<Op> = (0..3).map(|m| space.annihilation(m)).collect();

    let re = |x: f64| Complex64::new(x, 0.0);
    let coupling = |x: usize, y: usize| -> Op { ops[x].adjoint() * &ops[y] + ops[y].adjoint() * &ops[x] };
    let h = coupling(EXCITED, ATOMIC) * re(cfg.omega()) + coupling(EXCITED, PHOTON) * re(cfg.g_root_n0());
    let lossy = if cfg.gamma_a_on_excited_state() { EXCITED } else { PHOTON };
    let jumps: Vec<Op> = [(ATOMIC, cfg.gamma_c()), (lossy, cfg.gamma_a())]
        .iter()
        .filter(|(_, g)| *g > 0.0)
        .map(|&(m, g)| &ops[m] * re(g.sqrt()))
        .collect();
    let mut h_eff = h.clone();
    for l in &jumps {
        h_eff -= l.adjoint() * l * Complex64::new(0.0, 0.5);
    }
    let h_eff_adj = h_eff.adjoint();
    let jump_pairs: Vec<(Op, Op)> = jumps.iter().map(|l| (l.clone(), l.adjoint())).collect();

    let mut psi = vec![Complex64::new(0.0, 0.0); d];
    for (m, amp) in dark_state_amplitudes(n, cfg.theta()).into_iter().enumerate() {
        let mut s = [0; 3];
        s[ATOMIC] = m;
        s[PHOTON] = n - m;
        psi[space.index(&s)] = re(amp);
    }
    let rho0 = Op::from_fn(d, d, |i, j| psi[i] * psi[j].conj());

    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let rho = unpack(y, d);
        let mut drho = (&h_eff * &rho - &rho * &h_eff_adj) * minus_i;
        for (l, ld) in &jump_pairs {
            drho += l * &rho * ld;
        }
        pack(&drho, dy);
    };
    let mut y0 = vec![0.0; 2 * d * d];
    pack(&rho0, &mut y0);
    let settings = OdeSettings { rtol: 1e-11, atol: 1e-14, ..OdeSettings::default() };
    let states = integrate(rhs, 0.0, &y0, times, &settings)?;

    let products: Vec<Vec<Op>> = (0..3)
        .map(|i| (0..3).map(|j| ops[i].adjoint() * &ops[j]).collect())
        .collect();
    let mut moments = Vec::with_capacity(times.len());
    for (y, &t) in states.iter().zip(times) {
        let rho = unpack(y, d);
        let drift = (rho.trace() - re(1.0)).norm();
        if drift > TRACE_TOLERANCE {
            return Err(Error::TraceDrift { drift });
        }
        let s = Matrix3::from_fn(|i, j| (&rho * &products[i][j]).trace());
        moments.push(MomentMatrix::new(s, t));
    }
    Ok(EvolutionResult { times: times.to_vec(), moments, method: PropagationMethod::Integrator })
}

fn pack(m: &Op, out: &mut [f64]) {
    for (i, z) in m.iter().enumerate() {
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
}

fn unpack(v: &[f64], d: usize) -> Op {
    Op::from_iterator(d, d, (0..d * d).map(|i| Complex64::new(v[2 * i], v[2 * i + 1])))
}

//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::time::Instant;

use bec_eit::dynamics::{dark_state_moments, delay_time_tau_d, drift_matrix, evolve_moments, storage_time_tau_s, theta_sweep};
use bec_eit::gas::{reduce_y, Temperature};
use bec_eit::lindblad::lindblad_oracle;
use bec_eit::rates::{
    beliaev_rate, kinetic_theory_rate, landau_rate, low_k_asymptote, rate_t0_closed_form, total_rate,
    total_rate_with, UpperOccupation,
};
use bec_eit::{CondensateParams, CouplingConfig, QuadratureSettings, ReducedPoint};
use bec_eit_cli::app::main_with_args;
use bec_eit_cli::commands::{cmd_optimize, Pool};
use bec_eit_cli::RunConfig;
use bec_eit_validation::{outcome, run_all, Criterion, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * PI;

fn preset(name: &str) -> RunConfig {
    let mut c = RunConfig::new();
    c.apply_preset(name).unwrap();
    c
}

fn gas() -> CondensateParams {
    preset("hau1999").gas().unwrap()
}

fn slow_light(gamma_c: f64) -> CouplingConfig {
    CouplingConfig::from_couplings(TWO_PI * 5.61e6, TWO_PI * 10e6, TWO_PI * 10e6, gamma_c, 3e4).unwrap()
}

fn t0_closed_form_identity() -> Outcome {
    let p = gas();
    let q = QuadratureSettings::default();
    let mut worst: f64 = 0.0;
    for y in [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 50.0] {
        let pt = ReducedPoint::new(y, 0.0, p.reduced_splitting()).unwrap();
        let numeric = beliaev_rate(&p, &pt, &q).unwrap();
        let exact = rate_t0_closed_form(&p, y).unwrap();
        worst = worst.max((numeric / exact - 1.0).abs());
    }
    outcome(worst < 1e-6, format!("max relative error {worst:.2e} (limit 1e-6)"))
}

fn low_k_asymptote_ratio() -> Outcome {
    let p = gas();
    let ratios: Vec<f64> = [1e-3, 5e-3, 0.01, 0.02, 0.05]
        .iter()
        .map(|&y| rate_t0_closed_form(&p, y).unwrap() / low_k_asymptote(&p, y * p.healing_wavenumber()).unwrap())
        .collect();
    let ok = ratios.iter().all(|r| (0.98..=1.02).contains(r));
    outcome(ok, format!("ratios {:.4?} for y_k = 1e-3..0.05 (band [0.98, 1.02])", ratios))
}

fn high_k_kinetic_limit() -> Outcome {
    let p = gas();
    let y = 50.0;
    let r = rate_t0_closed_form(&p, y).unwrap() / kinetic_theory_rate(&p, y * p.healing_wavenumber()).unwrap();
    outcome((0.99..=1.01).contains(&r), format!("ratio {r:.5} at y_k = 50 (band [0.99, 1.01])"))
}

fn storage_times() -> Outcome {
    let p = gas();
    let q = QuadratureSettings::default();
    let tau = |y: f64| {
        let pt = reduce_y(&p, y, Temperature::FractionOfTc(0.5)).unwrap();
        storage_time_tau_s(&total_rate(&p, &pt, &q).unwrap()).unwrap() * 1e3
    };
    let (a, b) = (tau(0.1), tau(1.0));
    let ok = (a / 0.5 - 1.0).abs() <= 0.15 && (b / 4.1 - 1.0).abs() <= 0.15;
    outcome(ok, format!("tau_s(0.1) = {a:.3} ms (0.5 +-15%), tau_s(1) = {b:.3} ms (4.1 +-15%)"))
}

fn delay_time_factor() -> Outcome {
    let factors: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&g| delay_time_tau_d(&slow_light(g), (-1.0f64).exp()).unwrap() * g)
        .collect();
    let in_band = factors.iter().all(|f| (f - 1.2).abs() <= 0.1);
    let at_least_one = factors.iter().all(|&f| f >= 1.0);
    outcome(
        in_band && at_least_one,
        format!(
            "tau_d*gamma_C = {:.4?} for gamma_C = 1e2, 1e3, 1e4 (band 1.2 +-0.1: {}, >= 1: {})",
            factors, in_band, at_least_one
        ),
    )
}

fn finite_k_minimum() -> Outcome {
    let mut cfg = preset("hau1999");
    cfg.set("scan.t_over_tc", "0, 0.1, 0.3, 0.5").unwrap();
    let (table, _) = cmd_optimize(&cfg, &Pool::new(4).unwrap()).unwrap();
    let col = |name: &str| table.header.iter().position(|h| h == name).unwrap();
    let (yi, fi) = (col("y_star"), col("interior_minimum"));
    let ys: Vec<f64> = table.rows.iter().map(|r| r[yi].parse().unwrap()).collect();
    let flags: Vec<&str> = table.rows.iter().map(|r| r[fi].as_str()).collect();
    let z_cb = gas().reduced_splitting();
    let ok = z_cb > 10.0
        && table.all_ok()
        && flags == ["false", "true", "true", "true"]
        && ys[1..].windows(2).all(|w| w[1] >= w[0]);
    outcome(
        ok,
        format!("z_CB = {z_cb:.3e}; interior flags (T/Tc 0, 0.1, 0.3, 0.5) {flags:?}; y_star {:.3?}", ys),
    )
}

fn zcb_channels() -> Outcome {
    let p = gas();
    let q = QuadratureSettings::default();
    let base = reduce_y(&p, 0.05, Temperature::FractionOfTc(0.1)).unwrap();
    let zs = [1e-4, 1e-2, 1e2];
    let landau: Vec<f64> = zs.iter().map(|&z| landau_rate(&p, &base.with_z_cb(z).unwrap(), &q).unwrap()).collect();
    let beliaev: Vec<f64> = zs.iter().map(|&z| beliaev_rate(&p, &base.with_z_cb(z).unwrap(), &q).unwrap()).collect();
    let big = base.with_z_cb(1e2).unwrap();
    let thermal = total_rate(&p, &big, &q).unwrap().total;
    let empty = total_rate_with(&p, &big, &q, UpperOccupation::Empty).unwrap().total;
    let change = (thermal - empty).abs() / thermal;
    let ok = landau[2] > 10.0 * landau[0] && beliaev.windows(2).all(|w| w[1] <= w[0]) && change < 1e-3;
    outcome(
        ok,
        format!(
            "landau {:.4?}, beliaev [{}] at z_CB = 1e-4, 1e-2, 1e2; empty-C change {change:.2e}",
            landau,
            beliaev.iter().map(|b| format!("{b:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let times: Vec<f64> = (0..20).map(|i| 0.35 * i as f64).collect();
    let mut worst: f64 = 0.0;
    for n in [1.0, 2.0, 3.0] {
        for _ in 0..5 {
            let cfg = CouplingConfig::from_couplings(
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.0..1.5),
                rng.gen_range(0.0..0.6),
                n,
            )
            .unwrap();
            let m = evolve_moments(&dark_state_moments(&cfg), &drift_matrix(&cfg), &times).unwrap();
            let o = lindblad_oracle(&cfg, &times).unwrap();
            for (a, b) in m.populations().iter().zip(o.populations()) {
                for (x, r) in [(a.photon, b.photon), (a.atomic, b.atomic), (a.excited, b.excited)] {
                    // populations that have decayed below 1e-6 n are compared absolutely
                    worst = worst.max((x - r).abs() / r.abs().max(1e-6 * n));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && secs < 60.0,
        format!("max relative deviation {worst:.2e} (limit 1e-6), runtime {secs:.1} s (limit 60 s)"),
    )
}

fn conservation_and_protection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let times: Vec<f64> = (0..50).map(|i| 0.5 * i as f64).collect();
    let mut trace_drift: f64 = 0.0;
    for _ in 0..5 {
        let n = rng.gen_range(1.0..1e4);
        let cfg =
            CouplingConfig::from_couplings(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), 0.0, 0.0, n).unwrap();
        // start away from the dark state so the modes exchange population
        let mut s0 = dark_state_moments(&cfg);
        s0.matrix[(0, 0)].re += 0.3 * n;
        let evo = evolve_moments(&s0, &drift_matrix(&cfg), &times).unwrap();
        let t0 = evo.moments[0].trace();
        for m in &evo.moments {
            trace_drift = trace_drift.max((m.trace() - t0).abs() / t0);
        }
    }

    let cfg = slow_light(0.0);
    let n = cfg.photon_number();
    let times: Vec<f64> = (0..=40).map(|i| 2.5e-5 * i as f64).collect();
    let evo = evolve_moments(&dark_state_moments(&cfg), &drift_matrix(&cfg), &times).unwrap();
    let mut sum_drift: f64 = 0.0;
    let mut excited: f64 = 0.0;
    for p in evo.populations() {
        sum_drift = sum_drift.max((p.photon_plus_atomic() - n).abs() / n);
        excited = excited.max(p.excited / n);
    }
    outcome(
        trace_drift < 1e-10 && sum_drift < 1e-8 && excited < 1e-8,
        format!(
            "lossless trace drift {trace_drift:.2e} (1e-10); dark n_p+n_C drift {sum_drift:.2e} (1e-8); max n_A/n {excited:.2e} (1e-8)"
        ),
    )
}

fn theta_sweep_monotonicity() -> Outcome {
    let gamma_c = 1e3;
    let base = CouplingConfig::from_couplings(TWO_PI * 5.61e6, 0.0, TWO_PI * 10e6, gamma_c, 3e4).unwrap();
    let n = base.photon_number();
    let thetas: Vec<f64> = (0..50).map(|i| if i == 49 { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / 49.0 }).collect();
    let times = [0.0, 1e-4, 5e-4, 1e-3, 3e-3];
    let sweep = theta_sweep(&base, &thetas, &times).unwrap();
    let mut monotone = true;
    for j in 1..times.len() {
        monotone &= sweep.values.windows(2).all(|w| w[1][j] <= w[0][j]);
    }
    let start_dev = sweep.values.iter().map(|row| (row[0] - n).abs() / n).fold(0.0, f64::max);
    let last = sweep.values.last().unwrap();
    let exp_dev = times
        .iter()
        .zip(last)
        .map(|(t, v)| (v / (n * (-gamma_c * t).exp()) - 1.0).abs())
        .fold(0.0, f64::max);
    outcome(
        monotone && start_dev < 1e-6 && exp_dev < 1e-6,
        format!(
            "non-increasing in theta on 50 points: {monotone}; t=0 deviation {start_dev:.2e}; theta=pi/2 vs n e^(-gamma_C t) {exp_dev:.2e}"
        ),
    )
}

/// Runs the command-line entry point and returns the bytes written to `out`.
fn invoke(args: &[&str], out: &Path) -> Vec<u8> {
    let mut full = vec!["bec-eit"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--quiet", "--out", out.to_str().unwrap()]);
    let code = main_with_args(&full);
    assert_eq!(code, 0, "{args:?} exited with {code}");
    std::fs::read(out).unwrap()
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("bec-eit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let runs: [(&str, &str, &[&str]); 6] = [
        ("rates", "hau1999", &["scan.t_over_tc=0,0.1,0.5", "scan.y=logspace(0.01, 10, 24)"]),
        ("zcb-scan", "hau1999", &["scan.y=logspace(0.01, 10, 24)"]),
        ("optimize", "hau1999", &["scan.t_over_tc=0,0.1,0.3,0.5"]),
        ("theta-sweep", "hau1999", &[]),
        ("decay", "hau1999", &[]),
        ("store", "hau2001", &["ramp.samples=10"]),
    ];
    let mut differing = Vec::new();
    for (cmd, p, sets) in runs {
        let mut outputs = Vec::new();
        for (i, threads) in ["1", "8", "1", "8"].iter().enumerate() {
            let mut args = vec![cmd, "--preset", p, "--threads", threads];
            for s in sets {
                args.extend(["--set", s]);
            }
            outputs.push(invoke(&args, &dir.join(format!("{cmd}-{i}.csv"))));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(cmd);
        }
    }
    let csv = dir.join("rates-0.csv");
    let plot = |i: usize| {
        invoke(
            &["plot", csv.to_str().unwrap(), "--x", "y_k", "--y", "total_per_s", "--group", "t_over_tc", "--log-x", "--log-y"],
            &dir.join(format!("plot-{i}.svg")),
        )
    };
    let (a, b) = (plot(0), plot(1));
    if a != b || a.is_empty() {
        differing.push("plot");
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            "six CSV subcommands byte-identical across --threads 1/8 and repeats; SVG repeatable".to_string()
        } else {
            format!("outputs differ for {differing:?}")
        },
    )
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "T=0 closed-form identity", check: t0_closed_form_identity },
        Criterion { id: 2, name: "low-k asymptote", check: low_k_asymptote_ratio },
        Criterion { id: 3, name: "high-k kinetic limit", check: high_k_kinetic_limit },
        Criterion { id: 4, name: "storage times at T/Tc = 0.5", check: storage_times },
        Criterion { id: 5, name: "delay-time factor", check: delay_time_factor },
        Criterion { id: 6, name: "finite-k minimum structure", check: finite_k_minimum },
        Criterion { id: 7, name: "z_CB channel behaviour", check: zcb_channels },
        Criterion { id: 8, name: "oracle equivalence", check: oracle_equivalence },
        Criterion { id: 9, name: "conservation and dark-state protection", check: conservation_and_protection },
        Criterion { id: 10, name: "theta-sweep monotonicity", check: theta_sweep_monotonicity },
        Criterion { id: 11, name: "determinism", check: determinism },
    ];
    if run_all(&criteria) > 0 {
        std::process::exit(1);
    }
}

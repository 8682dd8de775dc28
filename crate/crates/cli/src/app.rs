//! Argument parsing and dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_decay, cmd_optimize, cmd_rates, cmd_store, cmd_theta_sweep, cmd_zcb_scan, Pool};
use crate::config::RunConfig;
use crate::error::Result;
use crate::plot::{render, PlotSpec};

/// Collisional decay rates and dark-state dynamics for light stored in a
/// Bose-Einstein condensate.
#[derive(Debug, Parser)]
#[command(name = "bec-eit", version)]
pub struct Cli {
    /// Flat `key = value` parameter file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Named parameter set (hau1999, hau2001), applied before the file.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Relative tolerance of the rate integrals.
    #[arg(long, global = true)]
    pub quad_rtol: Option<f64>,
    /// Suppress the text report some subcommands print to standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Beliaev and Landau rates over momentum and temperature.
    Rates,
    /// Rates over a family of level splittings.
    ZcbScan,
    /// Momentum that minimizes the total rate at each temperature.
    Optimize,
    /// Dark-state population against mixing angle and time.
    ThetaSweep,
    /// Population time series and the 1/e delay time.
    Decay,
    /// Store and retrieve through a mixing-angle ramp.
    Store,
    /// Draw a CSV table as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV table written by one of the other subcommands.
    pub csv: PathBuf,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Column whose values split the rows into curves.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub log_x: bool,
    #[arg(long)]
    pub log_y: bool,
    #[arg(long)]
    pub title: Option<String>,
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new();
        if let Some(p) = &self.preset {
            cfg.apply_preset(p)?;
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)?;
            cfg.merge_text(&text, &path.display().to_string())?;
        }
        if let Some(r) = self.quad_rtol {
            cfg.set("quad.rtol", &r.to_string())?;
        }
        if let Command::Plot(a) = &self.command {
            for (k, v) in [("plot.x", &a.x), ("plot.y", &a.y), ("plot.group", &a.group), ("plot.title", &a.title)] {
                if let Some(v) = v {
                    cfg.set(k, v)?;
                }
            }
            if a.log_x {
                cfg.set("plot.log_x", "true")?;
            }
            if a.log_y {
                cfg.set("plot.log_y", "true")?;
            }
        }
        for o in &self.overrides {
            cfg.set_override(o)?;
        }
        Ok(cfg)
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = cli.run_config()?;
    let pool = Pool::new(cli.threads)?;
    let (body, all_ok) = match &cli.command {
        Command::Plot(a) => {
            let text = fs::read_to_string(&a.csv)?;
            (render(&text, &PlotSpec::from_config(&cfg)?)?, true)
        }
        cmd => {
            let table = match cmd {
                Command::Rates => cmd_rates(&cfg, &pool)?,
                Command::ZcbScan => cmd_zcb_scan(&cfg, &pool)?,
                Command::Optimize => {
                    let (t, report) = cmd_optimize(&cfg, &pool)?;
                    if !cli.quiet {
                        eprint!("{report}");
                    }
                    t
                }
                Command::ThetaSweep => cmd_theta_sweep(&cfg, &pool)?,
                Command::Decay => cmd_decay(&cfg)?,
                Command::Store => cmd_store(&cfg)?,
                Command::Plot(_) => unreachable!(),
            };
            (table.to_string()?, table.all_ok())
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    if all_ok {
        Ok(0)
    } else {
        eprintln!("some rows failed; see the status column");
        Ok(2)
    }
}

/// Parses arguments, runs, and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bec-eit: {e}");
            e.exit_code()
        }
    }
}


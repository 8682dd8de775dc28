//! Command-line front end for the `bec-eit` library: parameter scans and
//! simulations written as CSV tables, plus a minimal SVG line plotter.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod table;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use table::Table;

//! CSV output tables.
//!
//! Every table starts with a `# schema_version=...` comment, then a header
//! whose column names carry units. Numbers use the shortest decimal that
//! round-trips, switching to scientific notation outside `[1e-4, 1e6)`.

use std::io::Write;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;
pub const STATUS_OK: &str = "ok";

pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if !(1e-4..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Status text safe to place in a CSV cell.
pub fn status_text(err: &impl std::fmt::Display) -> String {
    err.to_string().replace([',', '\n', '"'], ";")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Trailing `# key=value` records.
    pub footer: Vec<String>,
}

impl Table {
    pub fn new(command: &str, header: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// True when every row has an `ok` status (tables without a status column are all ok).
    pub fn all_ok(&self) -> bool {
        match self.header.iter().position(|h| h == "status") {
            None => true,
            Some(i) => self.rows.iter().all(|r| r[i] == STATUS_OK),
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema_version={SCHEMA_VERSION} command={}", self.command)?;
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        for f in &self.footer {
            writeln!(out, "# {f}")?;
        }
        Ok(())
    }

    pub fn to_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

//! Runner for the acceptance checks in `tests/acceptance.rs`.
//!
//! Each check returns an [`Outcome`]; [`run_all`] prints one PASS/FAIL line
//! per check and reports whether all of them passed.

use std::panic::{catch_unwind, UnwindSafe};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub check: fn() -> Outcome,
}

/// A panicking check counts as failed.
pub fn guarded<F: FnOnce() -> Outcome + UnwindSafe>(check: F) -> Outcome {
    catch_unwind(check).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    })
}

pub fn format_line(c: &Criterion, o: &Outcome) -> String {
    format!("{} criterion {:>2} {}: {}", if o.pass { "PASS" } else { "FAIL" }, c.id, c.name, o.detail)
}

/// Runs every criterion in order and returns the number that failed.
pub fn run_all(criteria: &[Criterion]) -> usize {
    let mut failed = 0;
    for c in criteria {
        let o = guarded(c.check);
        if !o.pass {
            failed += 1;
        }
        println!("{}", format_line(c, &o));
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    failed
}

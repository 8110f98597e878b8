//! Machine-readable run reports. Reports are deterministic: identical spec
//! and thread count produce byte-identical JSON (wall time is deliberately
//! excluded from the JSON body and printed to stderr instead).

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub detail: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub skipped: bool,
    pub skip_reason: String,
}

impl CheckItem {
    pub fn new(name: impl Into<String>, detail: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckItem {
            name: name.into(),
            detail: detail.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            skipped: false,
            skip_reason: String::new(),
        }
    }

    /// A check whose pass verdict is not a residual-below-tolerance test
    /// (e.g. "this norm must be large").
    pub fn verdict(name: impl Into<String>, detail: impl Into<String>, residual: f64, tolerance: f64, pass: bool) -> Self {
        CheckItem {
            name: name.into(),
            detail: detail.into(),
            residual,
            tolerance,
            pass,
            skipped: false,
            skip_reason: String::new(),
        }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckItem {
            name: name.into(),
            detail: String::new(),
            residual: 0.0,
            tolerance: 0.0,
            pass: true,
            skipped: true,
            skip_reason: reason.into(),
        }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub command: String,
    pub subject: String,
    pub n_max: usize,
    pub tol: f64,
    pub threads: usize,
    pub items: Vec<CheckItem>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub all_pass: bool,
}

impl RunReport {
    pub fn new(command: &str, subject: String, n_max: usize, tol: f64, threads: usize, items: Vec<CheckItem>) -> Self {
        let passed = items.iter().filter(|i| i.pass && !i.skipped).count();
        let failed = items.iter().filter(|i| !i.pass).count();
        let skipped = items.iter().filter(|i| i.skipped).count();
        RunReport {
            tool: "fockforge",
            command: command.to_string(),
            subject,
            n_max,
            tol,
            threads,
            items,
            passed,
            failed,
            skipped,
            all_pass: failed == 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn human_summary(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            if item.skipped {
                out.push_str(&format!("SKIP {} ({})\n", item.name, item.skip_reason));
            } else {
                out.push_str(&format!(
                    "{} {} residual {:.3e} (tol {:.1e}){}\n",
                    if item.pass { "PASS" } else { "FAIL" },
                    item.name,
                    item.residual,
                    item.tolerance,
                    if item.detail.is_empty() { String::new() } else { format!(" [{}]", item.detail) },
                ));
            }
        }
        out.push_str(&format!(
            "{}: {} passed, {} failed, {} skipped\n",
            if self.all_pass { "OK" } else { "FAILED" },
            self.passed,
            self.failed,
            self.skipped
        ));
        out
    }
}

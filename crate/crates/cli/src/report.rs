use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// A failed asserted check is a theorem violation (exit code 3);
    /// other checks are informational.
    #[serde(skip)]
    pub asserted: bool,
}

impl Check {
    /// `lhs <= rhs`, asserted.
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Check { name: name.into(), lhs, rhs, holds: lhs <= rhs + tol, asserted: true }
    }

    /// `lhs >= rhs`, asserted.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check { name: name.into(), lhs, rhs, holds: lhs >= rhs, asserted: true }
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub seed: u64,
    pub results: Value,
    pub checks: Vec<Check>,
    pub timing_ms: f64,
}

impl Report {
    pub fn violated(&self) -> bool {
        self.checks.iter().any(|c| c.asserted && !c.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "lhs", "rhs", "holds"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([c.name.clone(), c.lhs.to_string(), c.rhs.to_string(), c.holds.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn emit(&self, csv: bool, out: Option<&Path>) -> std::io::Result<()> {
        let text = if csv { self.to_csv() } else { self.to_json() + "\n" };
        match out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::spec::{Expect, Format};
use crate::holoalg::C64;

/// Wall-clock data; excluded from determinism comparisons.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub started_unix_ms: u64,
    pub wall_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub op: String,
    pub expect: Expect,
    pub outcome: Outcome,
    /// Whether the outcome matches the expectation.
    pub pass: bool,
    pub max_residual: Option<f64>,
    pub residuals: BTreeMap<String, Option<f64>>,
    /// Principal value of the check, as `[re, im]`.
    pub value: Option<[f64; 2]>,
    pub values: BTreeMap<String, [f64; 2]>,
    pub certificates: Vec<String>,
    pub error: Option<ErrorInfo>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    pub timestamp: Timestamp,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub(crate) fn pair(z: C64) -> Option<[f64; 2]> {
    (z.re.is_finite() && z.im.is_finite()).then_some([z.re, z.im])
}

impl CheckResult {
    pub(crate) fn new(id: &str, op: &str, expect: Expect) -> Self {
        CheckResult {
            id: id.into(),
            op: op.into(),
            expect,
            outcome: Outcome::Error,
            pass: false,
            max_residual: None,
            residuals: BTreeMap::new(),
            value: None,
            values: BTreeMap::new(),
            certificates: Vec::new(),
            error: None,
        }
    }

    /// Records a residual; non-finite values are stored as `null`.
    pub(crate) fn residual(&mut self, name: &str, r: f64) {
        self.residuals.insert(name.into(), finite(r));
        self.max_residual = self
            .residuals
            .values()
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
            .filter(|_| !self.residuals.is_empty());
    }

    pub(crate) fn value(&mut self, name: &str, z: C64) {
        match pair(z) {
            Some(p) => {
                self.values.insert(name.into(), p);
            }
            None => self.certificates.push(format!("{name} is not finite")),
        }
    }

    pub(crate) fn primary(&mut self, z: C64) {
        self.value = pair(z);
    }
}

impl Report {
    /// `0` when every check meets its expectation, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    /// JSON with the timestamp zeroed, for determinism comparisons.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.timestamp = Timestamp::default();
        r.to_json()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check_id,pass,max_residual,value_re,value_im\n");
        for c in &self.checks {
            let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            let (re, im) = match c.value {
                Some([re, im]) => (format!("{re:e}"), format!("{im:e}")),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(out, "{},{},{},{},{}", csv_field(&c.id), c.pass, num(c.max_residual), re, im);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {}, {} samples, tol {:e})", self.scenario, self.seed, self.samples, self.tolerance);
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "{status}  {:<28} {:<18}", c.id, c.op);
            if !c.expect.is_pass() {
                let _ = write!(out, " expect={}", c.expect);
            }
            if let Some(r) = c.max_residual {
                let _ = write!(out, " max_residual={r:.3e}");
            }
            if let Some([re, im]) = c.value {
                let _ = write!(out, " value={re}{im:+}i");
            }
            if let Some(e) = &c.error {
                let _ = write!(out, " error={}: {}", e.kind, e.message);
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(out, "{passed}/{} checks as expected in {:.1} ms", self.checks.len(), self.timestamp.wall_ms);
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

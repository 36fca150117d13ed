//! Declarative verification scenarios: a TOML grammar naming forms, maps,
//! lifts, loops and atlases, a list of checks over them, and structured
//! reports in text, JSON or CSV.

mod builtins;
mod report;
mod resolve;
mod run;
mod spec;

pub use builtins::{builtin, builtin_text, list_builtins, Builtin};
pub use report::{CheckResult, ErrorInfo, Outcome, Report, Timestamp};
pub use resolve::ERROR_KINDS;
pub use run::{horizontal_cases, run_scenario};
pub use spec::*;

use resolve::Resolved;

use crate::{Error, Result};

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;

/// A parsed scenario whose names, expressions and arities have been
/// checked. Equality compares the declarative content only.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    resolved: Resolved,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Scenario {
    pub fn from_spec(spec: ScenarioSpec) -> Result<Self> {
        let resolved = Resolved::resolve(&spec, None)?;
        Ok(Scenario { spec, resolved })
    }

    /// Replaces the tolerance, seed or sample count.
    pub fn with_overrides(mut self, tol: Option<f64>, seed: Option<u64>, samples: Option<usize>) -> Result<Self> {
        if let Some(t) = tol {
            self.spec.samples.tolerance = t;
        }
        if let Some(s) = seed {
            self.spec.samples.seed = s;
        }
        if let Some(c) = samples {
            self.spec.samples.count = c;
        }
        Scenario::from_spec(self.spec)
    }

    pub fn check_count(&self) -> usize {
        self.spec.checks.len()
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[start..].chars().count() + 1)
}

/// Parses and resolves a scenario. Syntax errors and errors inside
/// expression strings carry file line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let spec: ScenarioSpec = toml::from_str(text).map_err(|e| {
        let (line, column, token) = match e.span() {
            Some(span) => {
                let (l, c) = position(text, span.start);
                (l, c, text.get(span.clone()).unwrap_or("").to_string())
            }
            None => (0, 0, String::new()),
        };
        Error::Parse {
            line,
            column,
            token,
            message: e.message().to_string(),
        }
    })?;
    let resolved = Resolved::resolve(&spec, Some(text))?;
    Ok(Scenario { spec, resolved })
}

/// Renders a scenario back to TOML; `parse_scenario` of the output equals
/// the input.
pub fn print_scenario(s: &Scenario) -> String {
    toml::to_string(&s.spec).expect("scenario specs serialize to TOML")
}

#[cfg(test)]
mod tests;

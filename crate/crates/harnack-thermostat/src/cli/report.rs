//! Check records, the JSON summary and CSV series.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::tolerances::{tolerance_spec, Bound};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub suite: &'static str,
    pub reference: &'static str,
    /// Name of the tolerance the check uses.
    pub tolerance_name: &'static str,
    /// `None` when the computation itself failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub comparison: Bound,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    pub fn new(config: &RunConfig, suite: &'static str, name: String, tol: &'static str, value: Result<f64>) -> Self {
        let spec = tolerance_spec(tol).unwrap_or_else(|| panic!("no tolerance named {tol}"));
        let tolerance = config.tolerance(tol);
        let (residual, error) = match value {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = residual.is_some_and(|v| match spec.bound {
            Bound::AtMost => v <= tolerance,
            Bound::AtLeast => v >= tolerance,
        });
        CheckResult {
            name,
            suite,
            reference: spec.reference,
            tolerance_name: tol,
            residual,
            tolerance,
            comparison: spec.bound,
            pass,
            error,
        }
    }
}

/// A measured quantity recorded next to a stated claim; never fails a run.
#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub name: String,
    pub reference: &'static str,
    pub measured: String,
    pub claimed: String,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CsvSeries {
    pub file: String,
    #[serde(skip)]
    pub content: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub findings: Vec<Finding>,
    pub series: Vec<CsvSeries>,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    NothingRan,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::NothingRan => 3,
        }
    }
}

impl RunReport {
    pub fn new(config: RunConfig, checks: Vec<CheckResult>, findings: Vec<Finding>, series: Vec<CsvSeries>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        RunReport { config, checks, findings, series, passed, failed }
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn outcome(&self) -> Outcome {
        if self.checks.is_empty() {
            Outcome::NothingRan
        } else if self.failed > 0 {
            Outcome::Fail
        } else {
            Outcome::Pass
        }
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Writes `summary.json` and the CSV series into `dir`.
pub fn emit_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(report.series.len() + 1);
    let summary = dir.join("summary.json");
    std::fs::write(&summary, report.summary_json())?;
    written.push(summary);
    for s in &report.series {
        let p = dir.join(&s.file);
        std::fs::write(&p, &s.content)?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GeomError;

    #[test]
    fn empty_report_is_valid_json() {
        let r = RunReport::new(RunConfig::default(), vec![], vec![], vec![]);
        let v: serde_json::Value = serde_json::from_str(&r.summary_json()).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
        assert_eq!(r.outcome(), Outcome::NothingRan);
    }

    #[test]
    fn bounds_and_errors() {
        let cfg = RunConfig::default();
        assert!(CheckResult::new(&cfg, "flow", "a".into(), "evolution", Ok(1e-9)).pass);
        assert!(!CheckResult::new(&cfg, "flow", "a".into(), "surface_order", Ok(1.5)).pass);
        let c = CheckResult::new(&cfg, "flow", "a".into(), "evolution", Err(GeomError::Domain("x".into())));
        assert!(!c.pass && c.residual.is_none());
        assert!(!CheckResult::new(&cfg, "flow", "a".into(), "evolution", Ok(f64::NAN)).pass);
    }
}

//! Configuration, suite orchestration and report emission for the command line.

pub mod config;
pub mod report;
pub mod suites;
pub mod tolerances;

pub use config::{parse_config, tolerance_flag, RunConfig, Suite};
pub use report::{emit_report, CheckResult, Finding, Outcome, RunReport};
pub use suites::run_suite;

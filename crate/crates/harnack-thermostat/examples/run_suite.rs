//! Runs the identities suite in-process and prints each check.

use harnack_thermostat::cli::{parse_config, run_suite};
use harnack_thermostat::Result;

fn main() -> Result<()> {
    let flags = [("suite".to_string(), "identities".to_string())];
    let report = run_suite(&parse_config(None, &flags)?);
    for c in &report.checks {
        let r = c.residual.map_or("-".into(), |r| format!("{r:.2e}"));
        println!("{} {:<48} {:>10} {} {:.0e}", if c.pass { "ok  " } else { "FAIL" }, c.name, r, c.comparison, c.tolerance);
    }
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(())
}

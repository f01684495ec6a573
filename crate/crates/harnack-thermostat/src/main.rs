use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harnack_thermostat::cli::{emit_report, parse_config, run_suite, tolerance_flag, Outcome};

#[derive(Parser)]
#[command(version, about = "Verify thermostat metrics, Harnack quantities and W-entropy along explicit Ricci flows")]
struct Args {
    #[command(subcommand)]
    command: Option<Command>,
    /// Plain-text key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// identities | flow | harnack | thermostat | entropy | all
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Fiber dimensions, comma separated
    #[arg(long = "N", global = true)]
    n: Option<String>,
    /// Flow times, comma separated, inside (0, T)
    #[arg(long, global = true)]
    t_grid: Option<String>,
    /// Random seed, default 0
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output directory for summary.json and CSV series
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance override, repeatable
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bianchi and Ricci identities, autodiff against finite differences
    Identities,
    /// Ricci flow evolution equations and the surface flow
    Flow,
    /// Harnack positivity, algebraic identities, solitons
    Harnack,
    /// Thermostat closed forms, 1/N decay and limits
    Thermostat,
    /// W-entropy normalisation and monotonicity
    Entropy,
    /// Every suite in order
    All,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut flags: Vec<(String, String)> = vec![];
    let suite = args.command.map(|c| match c {
        Command::Identities => "identities",
        Command::Flow => "flow",
        Command::Harnack => "harnack",
        Command::Thermostat => "thermostat",
        Command::Entropy => "entropy",
        Command::All => "all",
    });
    // the subcommand wins over --suite
    for (key, value) in [
        ("suite", args.suite.clone()),
        ("suite", suite.map(String::from)),
        ("N", args.n.clone()),
        ("t_grid", args.t_grid.clone()),
        ("seed", args.seed.clone()),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
    ] {
        if let Some(v) = value {
            flags.push((key.into(), v));
        }
    }
    for t in &args.tol {
        match tolerance_flag(t) {
            Ok(f) => flags.push(f),
            Err(e) => return usage(&e.to_string()),
        }
    }
    let config = match parse_config(args.config.as_deref(), &flags) {
        Ok(c) => c,
        Err(e) => return usage(&e.to_string()),
    };

    let report = run_suite(&config);
    if let Err(e) = emit_report(&report, &config.out) {
        eprintln!("error: {e}");
        return ExitCode::from(4);
    }
    println!("{} checks, {} passed, {} failed; summary in {}", report.checks.len(), report.passed, report.failed, config.out.join("summary.json").display());
    let outcome = report.outcome();
    match outcome {
        Outcome::Pass => {}
        Outcome::Fail => {
            let c = report.first_failure().expect("a failing check");
            let detail = match (&c.residual, &c.error) {
                (_, Some(e)) => e.clone(),
                (Some(r), None) => format!("residual {r:e}, tolerance {:e}", c.tolerance),
                (None, None) => String::new(),
            };
            eprintln!("FAILED {}: {detail}", c.name);
        }
        Outcome::NothingRan => eprintln!("warning: nothing ran; the configuration selected no checks"),
    }
    ExitCode::from(outcome.exit_code() as u8)
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

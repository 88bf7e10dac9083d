//! Command-line front end. Exit codes are part of the contract:
//! 0 means every run, gate, rule, or comparison passed; 1 means a
//! measured failure (invalid run, missed gate, broken rule, drifted
//! reproduction); 2 means the inputs themselves were unusable.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use inferbench::checker::{check_logs_dir, render_audit};
use inferbench::config::SuiteConfig;
use inferbench::error::{HarnessError, Result};
use inferbench::report::{compare_reports, render_comparison, SuiteReport};
use inferbench::scaffold::scaffold;
use inferbench::suite::run_suite;

#[derive(Parser)]
#[command(name = "inferbench", version, about = "Scenario-driven inference benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark suite: accuracy then performance per benchmark,
    /// writing one log per benchmark plus report.json.
    Run {
        /// Suite config file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for logs and the report.
        #[arg(long)]
        out: PathBuf,
        /// Enforce the deployed run rules regardless of the config.
        #[arg(long)]
        full_rules: bool,
        /// Cap the configured cooldown between benchmarks.
        #[arg(long)]
        max_cooldown_ms: Option<u64>,
    },
    /// Audit a directory of run logs against the config that
    /// produced them.
    Check {
        /// Directory holding the .ndjson run logs.
        #[arg(long)]
        logs: PathBuf,
        /// Suite config the logs claim to implement.
        #[arg(long)]
        config: PathBuf,
        /// Audit under the deployed run rules regardless of the config.
        #[arg(long)]
        full_rules: bool,
    },
    /// Compare a reported result file against an independent
    /// measurement of the same suite.
    Verify {
        /// report.json as originally published.
        #[arg(long)]
        reported: PathBuf,
        /// report.json from the reproduction run.
        #[arg(long)]
        measured: PathBuf,
    },
    /// Write a starter config plus synthetic datasets into a directory.
    Init {
        /// Target directory (created if missing).
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out, full_rules, max_cooldown_ms } => {
            cmd_run(&config, &out, full_rules, max_cooldown_ms)
        }
        Command::Check { logs, config, full_rules } => cmd_check(&logs, &config, full_rules),
        Command::Verify { reported, measured } => cmd_verify(&reported, &measured),
        Command::Init { dir } => cmd_init(&dir),
    }
}

/// Parent of the config file, against which its relative paths resolve.
fn config_dir(config_path: &Path) -> PathBuf {
    match config_path.parent() {
        Some(p) if p.as_os_str().is_empty() => PathBuf::from("."),
        Some(p) => p.to_path_buf(),
        None => PathBuf::from("."),
    }
}

fn cmd_run(
    config_path: &Path,
    out: &Path,
    full_rules: bool,
    max_cooldown_ms: Option<u64>,
) -> Result<()> {
    let config = SuiteConfig::load(config_path)?;
    let outcome = run_suite(&config, &config_dir(config_path), out, full_rules, max_cooldown_ms)?;
    let report = SuiteReport::from_outcome(&outcome);
    let report_path = out.join("report.json");
    report.save(&report_path)?;
    print!("{}", report.render_table());
    println!("report: {}", report_path.display());
    if !outcome.all_gates_passed() {
        let failed: Vec<String> = outcome
            .benchmarks
            .iter()
            .filter(|b| !b.accuracy.passed)
            .map(|b| format!("{}/{}", b.benchmark_id, b.scenario))
            .collect();
        return Err(HarnessError::GateFailed(failed.join(", ")));
    }
    Ok(())
}

fn cmd_check(logs: &Path, config_path: &Path, full_rules: bool) -> Result<()> {
    let config = SuiteConfig::load(config_path)?;
    let report = check_logs_dir(logs, &config, &config_dir(config_path), full_rules)?;
    print!("{}", render_audit(&report));
    if !report.overall {
        let failed: Vec<String> = report
            .verdicts
            .iter()
            .filter(|v| v.status == inferbench_core::audit::RuleStatus::Fail)
            .map(|v| format!("{} ({})", v.rule_id, v.subject))
            .collect();
        return Err(HarnessError::AuditFailed(failed.join(", ")));
    }
    Ok(())
}

fn cmd_verify(reported: &Path, measured: &Path) -> Result<()> {
    let reported = SuiteReport::load(reported)?;
    let measured = SuiteReport::load(measured)?;
    let values = compare_reports(&reported, &measured)?;
    print!("{}", render_comparison(&values));
    let failed: Vec<String> = values
        .iter()
        .filter(|v| !v.check.passed)
        .map(|v| format!("{}/{} {}", v.benchmark_id, v.scenario, v.quantity))
        .collect();
    if !failed.is_empty() {
        return Err(HarnessError::ReproductionFailed(failed.join(", ")));
    }
    Ok(())
}

fn cmd_init(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let config_path = scaffold(dir)?;
    println!("wrote {}", config_path.display());
    println!("next: inferbench run --config {} --out results", config_path.display());
    Ok(())
}

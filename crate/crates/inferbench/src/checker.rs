//! Submission checking glue: assemble the expected-benchmark list from
//! a config (loading each dataset for sizes and ground truth), gather a
//! results directory's logs in suite order, and render the audit
//! report.

use std::path::Path;

use inferbench_core::audit::{check_submission, AuditReport, ExpectedBenchmark, RuleStatus};
use inferbench_core::benchmark::Mode;
use inferbench_core::record::LogRecord;

use crate::config::SuiteConfig;
use crate::dataset::Dataset;
use crate::error::{HarnessError, Result};
use crate::logio::parse_log;

/// Expected-benchmark list implied by a config: performance-mode
/// settings plus dataset facts, per entry.
pub fn build_expected(
    config: &SuiteConfig,
    config_dir: &Path,
    full_rules_flag: bool,
) -> Result<Vec<ExpectedBenchmark>> {
    let resolved = config.resolve(config_dir, full_rules_flag, None)?;
    let mut expected = Vec::with_capacity(resolved.len());
    for bench in &resolved {
        let dataset = Dataset::load(&bench.manifest_path)?;
        if dataset.benchmark_id() != bench.benchmark_id {
            return Err(HarnessError::Config(format!(
                "{}: manifest is for {}, benchmark entry is {}",
                bench.manifest_path.display(),
                dataset.benchmark_id(),
                bench.benchmark_id
            )));
        }
        expected.push(ExpectedBenchmark {
            benchmark_id: bench.benchmark_id,
            scenario: bench.scenario,
            settings: bench.settings(Mode::Performance, dataset.len()),
            quality_target: bench.quality_target.clone(),
            dataset_size: dataset.len(),
            ground_truth: dataset.ground_truth_vec(),
        });
    }
    Ok(expected)
}

/// All records from a results directory, files in lexical order (the
/// writer's numeric prefix makes that the suite order).
pub fn collect_logs(logs_dir: &Path) -> Result<Vec<LogRecord>> {
    let mut paths = Vec::new();
    let entries = std::fs::read_dir(logs_dir).map_err(|e| HarnessError::io(logs_dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| HarnessError::io(logs_dir, e))?;
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "ndjson") {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(HarnessError::Config(format!(
            "{}: no .ndjson log files found",
            logs_dir.display()
        )));
    }
    paths.sort();
    let mut records = Vec::new();
    for path in paths {
        records.extend(parse_log(&path)?);
    }
    Ok(records)
}

/// Audit a results directory against its config.
pub fn check_logs_dir(
    logs_dir: &Path,
    config: &SuiteConfig,
    config_dir: &Path,
    full_rules_flag: bool,
) -> Result<AuditReport> {
    let expected = build_expected(config, config_dir, full_rules_flag)?;
    let records = collect_logs(logs_dir)?;
    Ok(check_submission(&records, &expected))
}

pub fn render_audit(report: &AuditReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:<42} {:<6} detail\n",
        "rule", "subject", "status"
    ));
    for v in &report.verdicts {
        let status = match v.status {
            RuleStatus::Pass => "pass",
            RuleStatus::Warn => "warn",
            RuleStatus::Fail => "FAIL",
        };
        out.push_str(&format!(
            "{:<16} {:<42} {:<6} {}\n",
            v.rule_id, v.subject, status, v.detail
        ));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if report.overall { "pass" } else { "FAIL" }
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::run_suite;
    use crate::suite::tests_support::desk_suite_config;

    #[test]
    fn logs_from_a_run_pass_the_checker() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("results");
        let config = desk_suite_config(dir.path());
        run_suite(&config, dir.path(), &out, false, None).unwrap();
        let report = check_logs_dir(&out, &config, dir.path(), false).unwrap();
        assert!(
            report.overall,
            "checker rejected its own harness output:\n{}",
            render_audit(&report)
        );
    }

    #[test]
    fn empty_directory_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            collect_logs(dir.path()),
            Err(HarnessError::Config(_) | HarnessError::Io { .. })
        ));
    }
}

//! The suite summary report: a versioned JSON file plus a rendered
//! table, and the 5% reproduction comparison between two reports.

use std::path::Path;

use inferbench_core::audit::{verify_reproduction, ReproductionCheck};
use inferbench_core::benchmark::{BenchmarkId, Scenario};
use inferbench_core::rng::format_digest;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::suite::SuiteOutcome;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub benchmark_id: BenchmarkId,
    pub scenario: Scenario,
    pub log_file: String,
    pub accuracy_metric: String,
    pub accuracy_value_percent: f64,
    pub accuracy_threshold_percent: f64,
    pub accuracy_passed: bool,
    pub issued_count: u64,
    pub completed_count: u64,
    pub wall_time_ns: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub latency_p90_ns: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub throughput_sps: Option<f64>,
    pub accuracy_sequence_digest: String,
    pub performance_sequence_digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub all_gates_passed: bool,
    pub benchmarks: Vec<BenchmarkReport>,
}

impl SuiteReport {
    pub fn from_outcome(outcome: &SuiteOutcome) -> Self {
        SuiteReport {
            schema_version: REPORT_SCHEMA_VERSION,
            all_gates_passed: outcome.all_gates_passed(),
            benchmarks: outcome
                .benchmarks
                .iter()
                .map(|b| BenchmarkReport {
                    benchmark_id: b.benchmark_id,
                    scenario: b.scenario,
                    log_file: b.log_file.clone(),
                    accuracy_metric: b.accuracy.metric.clone(),
                    accuracy_value_percent: b.accuracy.value,
                    accuracy_threshold_percent: b.accuracy.threshold_used,
                    accuracy_passed: b.accuracy.passed,
                    issued_count: b.performance.issued_count,
                    completed_count: b.performance.completed_count,
                    wall_time_ns: b.performance.wall_time_ns,
                    latency_p90_ns: b.performance.latency_p90_ns,
                    throughput_sps: b.performance.throughput_sps,
                    accuracy_sequence_digest: format_digest(b.accuracy_digest),
                    performance_sequence_digest: format_digest(
                        b.performance.sample_sequence_digest,
                    ),
                })
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| HarnessError::Config(format!("report serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let report: SuiteReport = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "{}: report schema version {} is not the supported version {REPORT_SCHEMA_VERSION}",
                path.display(),
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// Human-readable summary table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<24} {:<14} {:>12} {:>12} {:>6}  {:>16}\n",
            "benchmark", "scenario", "accuracy%", "threshold%", "gate", "performance"
        ));
        for b in &self.benchmarks {
            let perf = match (b.latency_p90_ns, b.throughput_sps) {
                (Some(ns), _) => format!("p90 {:.3} ms", ns as f64 / 1e6),
                (None, Some(sps)) => format!("{sps:.1}/s"),
                (None, None) => "-".to_string(),
            };
            out.push_str(&format!(
                "{:<24} {:<14} {:>12.4} {:>12.4} {:>6}  {:>16}\n",
                b.benchmark_id.to_string(),
                b.scenario.to_string(),
                b.accuracy_value_percent,
                b.accuracy_threshold_percent,
                if b.accuracy_passed { "pass" } else { "FAIL" },
                perf
            ));
        }
        out
    }
}

/// One compared quantity in a reproduction check.
#[derive(Debug)]
pub struct ComparedValue {
    pub benchmark_id: BenchmarkId,
    pub scenario: Scenario,
    pub quantity: &'static str,
    pub check: ReproductionCheck,
}

/// Pair up two reports benchmark-by-benchmark and apply the 5%
/// reproduction rule to the accuracy value and the scenario's
/// performance metric. Mismatched benchmark sets are a usage error,
/// not a failed verification.
pub fn compare_reports(reported: &SuiteReport, measured: &SuiteReport) -> Result<Vec<ComparedValue>> {
    let key = |b: &BenchmarkReport| (b.benchmark_id, b.scenario);
    let reported_keys: Vec<_> = reported.benchmarks.iter().map(key).collect();
    let measured_keys: Vec<_> = measured.benchmarks.iter().map(key).collect();
    if reported_keys != measured_keys {
        return Err(HarnessError::Config(format!(
            "benchmark sets differ: reported {reported_keys:?}, measured {measured_keys:?}"
        )));
    }

    let mut values = Vec::new();
    for (r, m) in reported.benchmarks.iter().zip(&measured.benchmarks) {
        let mut push = |quantity: &'static str, rep: f64, mea: f64| -> Result<()> {
            let check = verify_reproduction(rep, mea).map_err(|e| {
                HarnessError::Config(format!(
                    "{}/{} {quantity}: {e}",
                    r.benchmark_id, r.scenario
                ))
            })?;
            values.push(ComparedValue {
                benchmark_id: r.benchmark_id,
                scenario: r.scenario,
                quantity,
                check,
            });
            Ok(())
        };
        push("accuracy", r.accuracy_value_percent, m.accuracy_value_percent)?;
        match (r.latency_p90_ns, m.latency_p90_ns) {
            (Some(a), Some(b)) => push("latency_p90", a as f64, b as f64)?,
            (None, None) => {}
            _ => {
                return Err(HarnessError::Config(format!(
                    "{}/{}: latency reported on one side only",
                    r.benchmark_id, r.scenario
                )))
            }
        }
        match (r.throughput_sps, m.throughput_sps) {
            (Some(a), Some(b)) => push("throughput", a, b)?,
            (None, None) => {}
            _ => {
                return Err(HarnessError::Config(format!(
                    "{}/{}: throughput reported on one side only",
                    r.benchmark_id, r.scenario
                )))
            }
        }
    }
    Ok(values)
}

pub fn render_comparison(values: &[ComparedValue]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:<14} {:<12} {:>14} {:>14} {:>9} {:>6}\n",
        "benchmark", "scenario", "quantity", "reported", "measured", "rel.diff", "5%"
    ));
    for v in values {
        out.push_str(&format!(
            "{:<24} {:<14} {:<12} {:>14.4} {:>14.4} {:>8.3}% {:>6}\n",
            v.benchmark_id.to_string(),
            v.scenario.to_string(),
            v.quantity,
            v.check.reported_value,
            v.check.measured_value,
            v.check.relative_difference * 100.0,
            if v.check.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}

//! Submission checking: replays a suite's log records against the run
//! rules and the configured expectations, producing per-rule verdicts.
//!
//! Rule identifiers:
//! - `structure`      header-first / footer-last / monotone timestamps
//! - `a.query_count`  performance run issued at least min_query_count
//! - `b.duration`     performance run spans at least min_duration
//! - `c.coverage`     accuracy run issued every dataset sample exactly once
//! - `d.quality_gate` accuracy value meets the quality target
//! - `e.digest`       footer digest matches the issue sequence and the
//!   sequence regenerated from the logged seed
//! - `f.order`        benchmarks appear in the configured order, accuracy
//!   before performance, with matching header settings
//! - `g.conservation` exactly one successful completion per issued query
//! - `h.summaries`    logged summaries match recomputation from raw records
//! - `cooldown`       inter-benchmark idle gap (warns when unverifiable)

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::{BenchmarkId, Mode, Scenario};
use crate::metrics::evaluate_accuracy;
use crate::predict::{GroundTruth, Prediction};
use crate::quality::{evaluate_quality, QualityTarget};
use crate::record::{CompletionStatus, LogRecord, RecordBody, SCHEMA_VERSION};
use crate::rng::{format_digest, sequence_digest, SamplePlan};
use crate::run::{offline_throughput, percentile, REPORTED_PERCENTILE};
use crate::settings::TestSettings;

/// Relative tolerance when recomputing summary statistics.
pub const SUMMARY_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for third-party result reproduction.
pub const REPRODUCTION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("reported value must be positive, got {0}")]
    NonPositiveReported(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleStatus {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleVerdict {
    pub rule_id: String,
    /// What the rule was applied to, e.g. "image_classification/single_stream".
    pub subject: String,
    pub status: RuleStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub verdicts: Vec<RuleVerdict>,
    /// True exactly when no verdict failed (warnings allowed).
    pub overall: bool,
}

impl AuditReport {
    fn from_verdicts(verdicts: Vec<RuleVerdict>) -> Self {
        let overall = verdicts.iter().all(|v| v.status != RuleStatus::Fail);
        AuditReport { verdicts, overall }
    }
}

/// What the configuration says one benchmark's pair of runs must look
/// like. `settings` describes the performance run; the accuracy run uses
/// the same seed and dataset with whole-set coverage.
#[derive(Debug, Clone)]
pub struct ExpectedBenchmark {
    pub benchmark_id: BenchmarkId,
    pub scenario: Scenario,
    pub settings: TestSettings,
    pub quality_target: QualityTarget,
    pub dataset_size: usize,
    /// Ground truth by sample index; used to recompute the accuracy value.
    pub ground_truth: Vec<GroundTruth>,
}

/// One run's records, decomposed. Construction enforces the structural
/// invariants shared by every rule.
struct ParsedRun<'a> {
    benchmark_id: BenchmarkId,
    scenario: Scenario,
    mode: Mode,
    seed: u64,
    min_query_count: u64,
    min_duration_ms: u64,
    performance_sample_count: u64,
    dataset_size: usize,
    header_ts: u64,
    footer_ts: u64,
    /// (query_id, sample_index, ts_ns) in file order.
    issues: Vec<(u64, usize, u64)>,
    /// (query_id, latency_ns, ts_ns, status, prediction) in file order.
    completions: Vec<(u64, u64, u64, CompletionStatus, Option<&'a Prediction>)>,
    accuracy_summary: Option<AccuracySummaryFields<'a>>,
    performance_summary: Option<PerformanceSummaryFields>,
    footer_issued: u64,
    footer_completed: u64,
    footer_digest: u64,
    footer_valid: bool,
    footer_invalid_reason: Option<&'a str>,
}

struct AccuracySummaryFields<'a> {
    metric: &'a str,
    value_percent: f64,
    threshold_percent: f64,
    passed: bool,
    samples_evaluated: u64,
}

struct PerformanceSummaryFields {
    issued_count: u64,
    completed_count: u64,
    wall_time_ns: u64,
    latency_p90_ns: Option<u64>,
    throughput_sps: Option<f64>,
}

/// Split a flat record stream into runs at RunHeader boundaries.
pub fn split_runs(records: &[LogRecord]) -> Result<Vec<&[LogRecord]>, String> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for (i, rec) in records.iter().enumerate() {
        if rec.is_header() {
            if start.is_some() {
                return Err(format!("record {i}: header before previous footer"));
            }
            start = Some(i);
        } else if start.is_none() {
            return Err(format!("record {i}: {} outside any run", rec.body.kind()));
        } else if rec.is_footer() {
            runs.push(&records[start.take().unwrap()..=i]);
        }
    }
    if let Some(s) = start {
        return Err(format!("run starting at record {s} has no footer"));
    }
    Ok(runs)
}

impl<'a> ParsedRun<'a> {
    fn parse(records: &'a [LogRecord]) -> Result<Self, String> {
        let header = records.first().ok_or("empty run")?;
        let RecordBody::RunHeader {
            benchmark_id,
            scenario,
            mode,
            seed,
            min_query_count,
            min_duration_ms,
            performance_sample_count,
            dataset_size,
        } = &header.body
        else {
            return Err(format!("run starts with {}, not a header", header.body.kind()));
        };
        if header.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema version {}", header.schema_version));
        }
        let footer = records.last().unwrap();
        let RecordBody::RunFooter {
            issued_count: footer_issued,
            completed_count: footer_completed,
            sample_sequence_digest: footer_digest,
            valid: footer_valid,
            invalid_reason,
        } = &footer.body
        else {
            return Err(format!("run ends with {}, not a footer", footer.body.kind()));
        };

        let mut run = ParsedRun {
            benchmark_id: *benchmark_id,
            scenario: *scenario,
            mode: *mode,
            seed: *seed,
            min_query_count: *min_query_count,
            min_duration_ms: *min_duration_ms,
            performance_sample_count: *performance_sample_count,
            dataset_size: *dataset_size,
            header_ts: header.ts_ns,
            footer_ts: footer.ts_ns,
            issues: Vec::new(),
            completions: Vec::new(),
            accuracy_summary: None,
            performance_summary: None,
            footer_issued: *footer_issued,
            footer_completed: *footer_completed,
            footer_digest: *footer_digest,
            footer_valid: *footer_valid,
            footer_invalid_reason: invalid_reason.as_deref(),
        };

        let mut prev_ts = header.ts_ns;
        for (i, rec) in records.iter().enumerate().skip(1) {
            if rec.ts_ns < prev_ts {
                return Err(format!(
                    "record {i}: timestamp {} precedes {} earlier in the run",
                    rec.ts_ns, prev_ts
                ));
            }
            prev_ts = rec.ts_ns;
            match &rec.body {
                RecordBody::RunHeader { .. } => {
                    return Err(format!("record {i}: second header inside a run"))
                }
                RecordBody::RunFooter { .. } if i + 1 != records.len() => {
                    return Err(format!("record {i}: footer before end of run"))
                }
                RecordBody::RunFooter { .. } => {}
                RecordBody::Issue { query_id, sample_index } => {
                    run.issues.push((*query_id, *sample_index, rec.ts_ns));
                }
                RecordBody::Completion { query_id, latency_ns, status, prediction, .. } => {
                    run.completions.push((*query_id, *latency_ns, rec.ts_ns, *status, prediction.as_ref()));
                }
                RecordBody::AccuracySummary {
                    metric,
                    value_percent,
                    threshold_percent,
                    passed,
                    samples_evaluated,
                } => {
                    run.accuracy_summary = Some(AccuracySummaryFields {
                        metric,
                        value_percent: *value_percent,
                        threshold_percent: *threshold_percent,
                        passed: *passed,
                        samples_evaluated: *samples_evaluated,
                    });
                }
                RecordBody::PerformanceSummary {
                    issued_count,
                    completed_count,
                    wall_time_ns,
                    latency_p90_ns,
                    throughput_sps,
                } => {
                    run.performance_summary = Some(PerformanceSummaryFields {
                        issued_count: *issued_count,
                        completed_count: *completed_count,
                        wall_time_ns: *wall_time_ns,
                        latency_p90_ns: *latency_p90_ns,
                        throughput_sps: *throughput_sps,
                    });
                }
            }
        }
        Ok(run)
    }

    /// Wall time from first issue to last completion.
    fn wall_time_ns(&self) -> u64 {
        let first = self.issues.first().map(|(_, _, ts)| *ts);
        let last = self.completions.iter().map(|(_, _, ts, _, _)| *ts).max();
        match (first, last) {
            (Some(a), Some(b)) if b >= a => b - a,
            _ => 0,
        }
    }
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::SingleStream => "single_stream",
        Scenario::Offline => "offline",
    }
}

fn rel_close(logged: f64, recomputed: f64) -> bool {
    if logged == recomputed {
        return true;
    }
    if recomputed == 0.0 {
        return false;
    }
    let rel = ((logged - recomputed) / recomputed).abs();
    rel <= SUMMARY_TOLERANCE
}

struct Verdicts(Vec<RuleVerdict>);

impl Verdicts {
    fn push(&mut self, rule_id: &str, subject: &str, status: RuleStatus, detail: String) {
        self.0.push(RuleVerdict {
            rule_id: rule_id.to_string(),
            subject: subject.to_string(),
            status,
            detail,
        });
    }

    fn check(&mut self, rule_id: &str, subject: &str, ok: bool, detail: String) {
        let status = if ok { RuleStatus::Pass } else { RuleStatus::Fail };
        self.push(rule_id, subject, status, detail);
    }
}

/// Validate a whole suite's records against the configured expectations.
/// `records` holds every run back to back, in execution order; each
/// benchmark contributes an accuracy run followed by a performance run.
pub fn check_submission(records: &[LogRecord], expected: &[ExpectedBenchmark]) -> AuditReport {
    let mut v = Verdicts(Vec::new());

    let run_slices = match split_runs(records) {
        Ok(r) => r,
        Err(e) => {
            v.push("structure", "suite", RuleStatus::Fail, e);
            return AuditReport::from_verdicts(v.0);
        }
    };

    let mut runs = Vec::with_capacity(run_slices.len());
    for (i, slice) in run_slices.iter().enumerate() {
        match ParsedRun::parse(slice) {
            Ok(r) => runs.push(r),
            Err(e) => {
                v.push("structure", &format!("run {i}"), RuleStatus::Fail, e);
                return AuditReport::from_verdicts(v.0);
            }
        }
    }
    v.push("structure", "suite", RuleStatus::Pass, format!("{} well-formed runs", runs.len()));

    if runs.len() != expected.len() * 2 {
        v.push(
            "f.order",
            "suite",
            RuleStatus::Fail,
            format!(
                "expected {} runs ({} benchmarks x accuracy+performance), found {}",
                expected.len() * 2,
                expected.len(),
                runs.len()
            ),
        );
        return AuditReport::from_verdicts(v.0);
    }

    let mut prev_footer_ts: Option<u64> = None;
    for (i, exp) in expected.iter().enumerate() {
        let acc = &runs[2 * i];
        let perf = &runs[2 * i + 1];
        let subject = format!("{}/{}", exp.benchmark_id, scenario_name(exp.scenario));

        check_order(&mut v, &subject, exp, acc, perf);
        check_accuracy_run(&mut v, &subject, exp, acc);
        check_performance_run(&mut v, &subject, exp, perf);
        for run in [acc, perf] {
            check_conservation(&mut v, &subject, run);
            check_digest(&mut v, &subject, run);
        }
        check_cooldown(&mut v, &subject, exp, prev_footer_ts, acc.header_ts);
        prev_footer_ts = Some(perf.footer_ts);
    }

    AuditReport::from_verdicts(v.0)
}

fn check_order(v: &mut Verdicts, subject: &str, exp: &ExpectedBenchmark, acc: &ParsedRun, perf: &ParsedRun) {
    let mut problems = Vec::new();
    for (label, run, want_mode) in [("accuracy", acc, Mode::Accuracy), ("performance", perf, Mode::Performance)] {
        if run.benchmark_id != exp.benchmark_id || run.scenario != exp.scenario {
            problems.push(format!(
                "{label} run is {}/{}, expected {subject}",
                run.benchmark_id,
                scenario_name(run.scenario)
            ));
        }
        if run.mode != want_mode {
            problems.push(format!("{label} slot ran in {:?} mode", run.mode));
        }
        if run.seed != exp.settings.seed {
            problems.push(format!("{label} run seed {} != configured {}", run.seed, exp.settings.seed));
        }
        if run.dataset_size != exp.dataset_size {
            problems.push(format!(
                "{label} run dataset size {} != configured {}",
                run.dataset_size, exp.dataset_size
            ));
        }
        if run.performance_sample_count != exp.settings.performance_sample_count {
            problems.push(format!(
                "{label} run performance_sample_count {} != configured {}",
                run.performance_sample_count, exp.settings.performance_sample_count
            ));
        }
    }
    if perf.min_query_count != exp.settings.min_query_count
        || perf.min_duration_ms != exp.settings.min_duration_ms
    {
        problems.push(format!(
            "performance run settings {}q/{}ms != configured {}q/{}ms",
            perf.min_query_count,
            perf.min_duration_ms,
            exp.settings.min_query_count,
            exp.settings.min_duration_ms
        ));
    }
    v.check(
        "f.order",
        subject,
        problems.is_empty(),
        if problems.is_empty() {
            "accuracy then performance, settings match configuration".to_string()
        } else {
            problems.join("; ")
        },
    );
}

fn check_accuracy_run(v: &mut Verdicts, subject: &str, exp: &ExpectedBenchmark, acc: &ParsedRun) {
    // (c) whole-dataset coverage, each sample exactly once
    let mut seen = alloc::vec![0u32; exp.dataset_size];
    let mut out_of_range = 0usize;
    for (_, sample, _) in &acc.issues {
        match seen.get_mut(*sample) {
            Some(n) => *n += 1,
            None => out_of_range += 1,
        }
    }
    let missing = seen.iter().filter(|n| **n == 0).count();
    let duplicated = seen.iter().filter(|n| **n > 1).count();
    v.check(
        "c.coverage",
        subject,
        out_of_range == 0 && missing == 0 && duplicated == 0,
        format!(
            "{} issues over {} samples ({missing} missing, {duplicated} duplicated, {out_of_range} out of range)",
            acc.issues.len(),
            exp.dataset_size
        ),
    );

    // recompute the metric from logged predictions and config ground truth
    let recomputed = recompute_accuracy(exp, acc);

    let Some(summary) = &acc.accuracy_summary else {
        v.push("d.quality_gate", subject, RuleStatus::Fail, "accuracy run has no accuracy summary".to_string());
        return;
    };

    // (d) the gate itself, on the logged value
    let gate = evaluate_quality(summary.value_percent, &exp.quality_target);
    let mut problems = Vec::new();
    if !gate.passed {
        problems.push(format!(
            "accuracy {:.4} below target {:.4}",
            summary.value_percent, gate.threshold_used
        ));
    }
    if summary.passed != gate.passed {
        problems.push("logged pass flag disagrees with the gate".to_string());
    }
    if !rel_close(summary.threshold_percent, gate.threshold_used) {
        problems.push(format!(
            "logged threshold {} != configured {}",
            summary.threshold_percent, gate.threshold_used
        ));
    }
    if summary.metric != exp.benchmark_id.metric_name() {
        problems.push(format!(
            "metric name '{}' != expected '{}'",
            summary.metric,
            exp.benchmark_id.metric_name()
        ));
    }
    v.check(
        "d.quality_gate",
        subject,
        problems.is_empty(),
        if problems.is_empty() {
            format!("{} = {:.4} >= {:.4}", summary.metric, summary.value_percent, gate.threshold_used)
        } else {
            problems.join("; ")
        },
    );

    // (h) for the accuracy run: the logged value matches recomputation
    match recomputed {
        Ok(value_percent) => {
            let ok = rel_close(summary.value_percent, value_percent)
                && summary.samples_evaluated == acc.completions.len() as u64;
            v.check(
                "h.summaries",
                &format!("{subject}/accuracy"),
                ok,
                format!(
                    "logged {} = {:.6}, recomputed {:.6} over {} samples",
                    summary.metric,
                    summary.value_percent,
                    value_percent,
                    acc.completions.len()
                ),
            );
        }
        Err(e) => {
            v.push("h.summaries", &format!("{subject}/accuracy"), RuleStatus::Fail, e);
        }
    }
}

fn recompute_accuracy(exp: &ExpectedBenchmark, acc: &ParsedRun) -> Result<f64, String> {
    let mut sample_of_query = alloc::collections::BTreeMap::new();
    for (qid, sample, _) in &acc.issues {
        sample_of_query.insert(*qid, *sample);
    }
    let mut preds = Vec::with_capacity(acc.completions.len());
    let mut gts = Vec::with_capacity(acc.completions.len());
    for (qid, _, _, status, prediction) in &acc.completions {
        if *status != CompletionStatus::Success {
            return Err(format!("query {qid} completed with failure status"));
        }
        let Some(pred) = prediction else {
            return Err(format!("accuracy-mode completion for query {qid} carries no prediction"));
        };
        let Some(sample) = sample_of_query.get(qid) else {
            return Err(format!("completion for query {qid} has no matching issue"));
        };
        let Some(gt) = exp.ground_truth.get(*sample) else {
            return Err(format!("no ground truth for sample {sample}"));
        };
        preds.push((*pred).clone());
        gts.push(gt.clone());
    }
    evaluate_accuracy(exp.benchmark_id, &preds, &gts)
        .map(|fraction| fraction * 100.0)
        .map_err(|e| format!("recomputation failed: {e}"))
}

fn check_performance_run(v: &mut Verdicts, subject: &str, exp: &ExpectedBenchmark, perf: &ParsedRun) {
    // (a) enough queries
    let issued = perf.issues.len() as u64;
    v.check(
        "a.query_count",
        subject,
        issued >= exp.settings.min_query_count,
        format!("issued {issued}, minimum {}", exp.settings.min_query_count),
    );

    // (b) long enough
    let wall = perf.wall_time_ns();
    let min_ns = exp.settings.min_duration_ms * 1_000_000;
    v.check(
        "b.duration",
        subject,
        wall >= min_ns,
        format!("wall {wall} ns, minimum {min_ns} ns"),
    );

    // (h) summary recomputation from raw issue/completion records
    let Some(summary) = &perf.performance_summary else {
        v.push(
            "h.summaries",
            &format!("{subject}/performance"),
            RuleStatus::Fail,
            "performance run has no performance summary".to_string(),
        );
        return;
    };
    let mut problems = Vec::new();
    if summary.issued_count != issued {
        problems.push(format!("summary issued {} != {} issue records", summary.issued_count, issued));
    }
    let completed = perf.completions.len() as u64;
    if summary.completed_count != completed {
        problems.push(format!(
            "summary completed {} != {} completion records",
            summary.completed_count, completed
        ));
    }
    if summary.wall_time_ns != wall {
        problems.push(format!("summary wall {} != recomputed {}", summary.wall_time_ns, wall));
    }

    let latencies: Vec<u64> = perf.completions.iter().map(|(_, latency, _, _, _)| *latency).collect();

    match (perf.scenario, summary.latency_p90_ns, summary.throughput_sps) {
        (Scenario::SingleStream, Some(logged_p90), None) => match percentile(&latencies, REPORTED_PERCENTILE) {
            Ok(p90) if p90 == logged_p90 => {}
            Ok(p90) => problems.push(format!("summary p90 {logged_p90} != recomputed {p90}")),
            Err(e) => problems.push(format!("cannot recompute p90: {e}")),
        },
        (Scenario::Offline, None, Some(logged_tp)) => {
            let tp = offline_throughput(completed, wall);
            if !rel_close(logged_tp, tp) {
                problems.push(format!("summary throughput {logged_tp} != recomputed {tp}"));
            }
        }
        _ => problems.push("summary metric does not match the scenario".to_string()),
    }

    v.check(
        "h.summaries",
        &format!("{subject}/performance"),
        problems.is_empty(),
        if problems.is_empty() {
            format!("{completed} completions consistent with summary")
        } else {
            problems.join("; ")
        },
    );
}

fn check_conservation(v: &mut Verdicts, subject: &str, run: &ParsedRun) {
    let label = format!("{subject}/{}", run.mode);
    let mut problems = Vec::new();

    let mut outstanding = alloc::collections::BTreeMap::new();
    let mut issue_ts = alloc::collections::BTreeMap::new();
    for (qid, _, ts) in &run.issues {
        if outstanding.insert(*qid, 0u32).is_some() {
            problems.push(format!("query {qid} issued twice"));
        }
        issue_ts.insert(*qid, *ts);
    }
    for (qid, latency, ts, status, _) in &run.completions {
        match outstanding.get_mut(qid) {
            Some(n) => *n += 1,
            None => problems.push(format!("completion for never-issued query {qid}")),
        }
        if *status != CompletionStatus::Success {
            problems.push(format!("query {qid} failed"));
        }
        // completion timestamps are stamped by the same clock that
        // measures latency, so the gap must reproduce it exactly
        match issue_ts.get(qid) {
            Some(start) if ts >= start => {
                if ts - start != *latency {
                    problems.push(format!(
                        "query {qid}: logged latency {latency} != timestamp gap {}",
                        ts - start
                    ));
                }
            }
            Some(_) => problems.push(format!("query {qid}: completion before its issue")),
            None => {}
        }
    }
    let unfinished = outstanding.values().filter(|n| **n == 0).count();
    let duplicated = outstanding.values().filter(|n| **n > 1).count();
    if unfinished > 0 {
        problems.push(format!("{unfinished} queries never completed"));
    }
    if duplicated > 0 {
        problems.push(format!("{duplicated} queries completed more than once"));
    }
    if run.footer_issued != run.issues.len() as u64 {
        problems.push(format!(
            "footer issued {} != {} issue records",
            run.footer_issued,
            run.issues.len()
        ));
    }
    if run.footer_completed != run.completions.len() as u64 {
        problems.push(format!(
            "footer completed {} != {} completion records",
            run.footer_completed,
            run.completions.len()
        ));
    }
    if !run.footer_valid {
        problems.push(format!(
            "run marked invalid: {}",
            run.footer_invalid_reason.unwrap_or("no reason recorded")
        ));
    }
    v.check(
        "g.conservation",
        &label,
        problems.is_empty(),
        if problems.is_empty() {
            format!("{} queries, exactly-once completion", run.issues.len())
        } else {
            problems.join("; ")
        },
    );
}

fn check_digest(v: &mut Verdicts, subject: &str, run: &ParsedRun) {
    let label = format!("{subject}/{}", run.mode);
    let issued: Vec<usize> = run.issues.iter().map(|(_, s, _)| *s).collect();
    let from_log = sequence_digest(&issued);

    let mut problems = Vec::new();
    if from_log != run.footer_digest {
        problems.push(format!(
            "footer digest {} != digest of logged issues {}",
            format_digest(run.footer_digest),
            format_digest(from_log)
        ));
    }
    match SamplePlan::new(run.mode, run.seed, run.dataset_size, run.performance_sample_count) {
        Ok(plan) => {
            let regenerated = plan.sequence(issued.len());
            if sequence_digest(&regenerated) != from_log {
                problems.push("issue sequence does not match regeneration from the logged seed".to_string());
            }
        }
        Err(e) => problems.push(format!("cannot rebuild sample plan: {e}")),
    }
    v.check(
        "e.digest",
        &label,
        problems.is_empty(),
        if problems.is_empty() {
            format!("digest {} reproduced from seed {}", format_digest(from_log), run.seed)
        } else {
            problems.join("; ")
        },
    );
}

fn check_cooldown(
    v: &mut Verdicts,
    subject: &str,
    exp: &ExpectedBenchmark,
    prev_footer_ts: Option<u64>,
    header_ts: u64,
) {
    let want_ns = exp.settings.cooldown_ms * 1_000_000;
    if want_ns == 0 {
        v.push("cooldown", subject, RuleStatus::Pass, "no cooldown configured".to_string());
        return;
    }
    match prev_footer_ts {
        None => v.push("cooldown", subject, RuleStatus::Pass, "first benchmark, nothing to cool down from".to_string()),
        Some(prev) if header_ts >= prev && header_ts - prev >= want_ns => v.push(
            "cooldown",
            subject,
            RuleStatus::Pass,
            format!("idle {} ns before start", header_ts - prev),
        ),
        Some(prev) => v.push(
            "cooldown",
            subject,
            RuleStatus::Warn,
            format!(
                "configured cooldown {want_ns} ns not evidenced by timestamps (gap {})",
                header_ts.saturating_sub(prev)
            ),
        ),
    }
}

/// Third-party reproduction of a single reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionCheck {
    pub reported_value: f64,
    pub measured_value: f64,
    pub tolerance: f64,
    pub relative_difference: f64,
    pub passed: bool,
}

/// Accept a measurement that lands within 5% (inclusive) of the
/// reported value; applies to latency, throughput, and accuracy alike.
pub fn verify_reproduction(reported: f64, measured: f64) -> Result<ReproductionCheck, AuditError> {
    if reported <= 0.0 || reported.is_nan() {
        return Err(AuditError::NonPositiveReported(reported));
    }
    let relative_difference = ((measured - reported) / reported).abs();
    Ok(ReproductionCheck {
        reported_value: reported,
        measured_value: measured,
        tolerance: REPRODUCTION_TOLERANCE,
        relative_difference,
        passed: relative_difference <= REPRODUCTION_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduction_boundaries() {
        assert!(verify_reproduction(100.0, 104.0).unwrap().passed);
        assert!(verify_reproduction(100.0, 105.0).unwrap().passed); // inclusive
        assert!(!verify_reproduction(100.0, 106.0).unwrap().passed);
        assert!(verify_reproduction(100.0, 96.0).unwrap().passed);
        assert!(!verify_reproduction(100.0, 94.0).unwrap().passed);
        assert!(verify_reproduction(42.0, 42.0).unwrap().passed);
        assert!(matches!(verify_reproduction(0.0, 1.0), Err(AuditError::NonPositiveReported(_))));
        assert!(matches!(verify_reproduction(-3.0, 1.0), Err(AuditError::NonPositiveReported(_))));
    }

    #[test]
    fn split_runs_finds_boundaries_and_rejects_strays() {
        use crate::record::{LogRecord, RecordBody};
        let header = |ts| {
            LogRecord::new(
                ts,
                RecordBody::RunHeader {
                    benchmark_id: BenchmarkId::ImageClassification,
                    scenario: Scenario::SingleStream,
                    mode: Mode::Accuracy,
                    seed: 1,
                    min_query_count: 1,
                    min_duration_ms: 0,
                    performance_sample_count: 1,
                    dataset_size: 1,
                },
            )
        };
        let footer = |ts| {
            LogRecord::new(
                ts,
                RecordBody::RunFooter {
                    issued_count: 0,
                    completed_count: 0,
                    sample_sequence_digest: 0,
                    valid: true,
                    invalid_reason: None,
                },
            )
        };
        let records = vec![header(1), footer(2), header(3), footer(4)];
        let runs = split_runs(&records).unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].len(), 2);

        let stray = vec![footer(1)];
        assert!(split_runs(&stray).is_err());
        let unterminated = vec![header(1)];
        assert!(split_runs(&unterminated).is_err());
        let nested = vec![header(1), header(2), footer(3)];
        assert!(split_runs(&nested).is_err());
    }

    #[test]
    fn parse_rejects_time_travel() {
        use crate::record::{LogRecord, RecordBody};
        let records = vec![
            LogRecord::new(
                10,
                RecordBody::RunHeader {
                    benchmark_id: BenchmarkId::ImageClassification,
                    scenario: Scenario::SingleStream,
                    mode: Mode::Performance,
                    seed: 1,
                    min_query_count: 1,
                    min_duration_ms: 0,
                    performance_sample_count: 1,
                    dataset_size: 1,
                },
            ),
            LogRecord::new(5, RecordBody::Issue { query_id: 0, sample_index: 0 }),
            LogRecord::new(
                20,
                RecordBody::RunFooter {
                    issued_count: 1,
                    completed_count: 0,
                    sample_sequence_digest: 0,
                    valid: true,
                    invalid_reason: None,
                },
            ),
        ];
        let err = match ParsedRun::parse(&records) {
            Err(e) => e,
            Ok(_) => panic!("expected a structural error"),
        };
        assert!(err.contains("precedes"));
    }
}

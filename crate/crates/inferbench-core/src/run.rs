//! Query/completion evidence and per-run performance summaries.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::{Mode, Scenario};

/// Latency percentile reported for single-stream runs.
pub const REPORTED_PERCENTILE: f64 = 0.90;

/// One unit of work sent to the system under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySample {
    pub query_id: u64,
    pub sample_index: usize,
    /// Monotonic timestamp at issue, in nanoseconds.
    pub issue_ts_ns: u64,
}

/// Timing evidence for one completed query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub query_id: u64,
    /// Monotonic timestamp at completion, in nanoseconds.
    pub complete_ts_ns: u64,
    pub latency_ns: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("percentile of an empty latency set")]
    EmptyInput,
    #[error("percentile fraction must be in (0, 1]")]
    FractionOutOfRange,
}

/// Nearest-rank percentile: sort ascending and take the element at rank
/// `ceil(p * n)`, 1-based. Exact order statistic, no interpolation.
pub fn percentile(latencies: &[u64], p: f64) -> Result<u64, StatsError> {
    if latencies.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(StatsError::FractionOutOfRange);
    }
    let mut sorted: Vec<u64> = latencies.to_vec();
    sorted.sort_unstable();
    let x = p * sorted.len() as f64;
    let mut rank = x as usize;
    if (rank as f64) < x {
        rank += 1;
    }
    rank = rank.max(1);
    Ok(sorted[rank - 1])
}

/// Outcome of one run: counts, wall time, and the scenario's metric.
/// Exactly one of `latency_p90_ns` / `throughput_sps` is populated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub scenario: Scenario,
    pub mode: Mode,
    pub issued_count: u64,
    pub completed_count: u64,
    pub wall_time_ns: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub latency_p90_ns: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub throughput_sps: Option<f64>,
    /// FNV-1a digest of the issued sample-index sequence.
    pub sample_sequence_digest: u64,
}

impl RunResult {
    pub fn single_stream(
        mode: Mode,
        issued: u64,
        completed: u64,
        wall_time_ns: u64,
        latencies: &[u64],
        digest: u64,
    ) -> Result<Self, StatsError> {
        Ok(RunResult {
            scenario: Scenario::SingleStream,
            mode,
            issued_count: issued,
            completed_count: completed,
            wall_time_ns,
            latency_p90_ns: Some(percentile(latencies, REPORTED_PERCENTILE)?),
            throughput_sps: None,
            sample_sequence_digest: digest,
        })
    }

    pub fn offline(
        mode: Mode,
        issued: u64,
        completed: u64,
        wall_time_ns: u64,
        digest: u64,
    ) -> Self {
        RunResult {
            scenario: Scenario::Offline,
            mode,
            issued_count: issued,
            completed_count: completed,
            wall_time_ns,
            latency_p90_ns: None,
            throughput_sps: Some(offline_throughput(completed, wall_time_ns)),
            sample_sequence_digest: digest,
        }
    }
}

/// Average throughput in samples per second over the span from first
/// issue to last completion.
pub fn offline_throughput(completed: u64, wall_time_ns: u64) -> f64 {
    if wall_time_ns == 0 {
        return 0.0;
    }
    completed as f64 / (wall_time_ns as f64 / 1e9)
}

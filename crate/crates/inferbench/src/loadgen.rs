//! The load generator: drives one benchmark run end to end — issues
//! queries per the scenario's traffic shape, records every event to the
//! log, waits for completions, and produces the run's summary.
//!
//! Timing contract: issue and completion timestamps are taken inside
//! the log lock, so file order and timestamp order always agree, even
//! with completions arriving from backend worker threads.

use std::collections::HashMap;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use inferbench_core::benchmark::{BenchmarkId, Mode, Scenario};
use inferbench_core::metrics::evaluate_accuracy;
use inferbench_core::predict::{GroundTruth, Prediction};
use inferbench_core::quality::{evaluate_quality, MetricResult, QualityTarget};
use inferbench_core::record::{CompletionStatus, LogRecord, RecordBody, SCHEMA_VERSION};
use inferbench_core::rng::{sequence_digest, SamplePlan};
use inferbench_core::run::{QuerySample, RunResult};
use inferbench_core::settings::TestSettings;

use crate::backend::{Backend, Completion, CompletionSink};
use crate::clock::Clock;
use crate::dataset::PreprocessedSample;
use crate::error::{HarnessError, Result};
use crate::logio::LogSink;

/// Log destination shared across the runs that land in one file.
pub type SharedSink = Arc<Mutex<dyn LogSink>>;

/// Everything one run needs besides the backend and the clock.
pub struct RunSpec<'a> {
    pub benchmark_id: BenchmarkId,
    pub settings: TestSettings,
    pub dataset_size: usize,
    pub quality_target: &'a QualityTarget,
    /// Preprocessed inputs for every index the plan can issue.
    pub inputs: &'a HashMap<usize, Arc<PreprocessedSample>>,
    pub ground_truth: &'a [GroundTruth],
}

#[derive(Debug)]
pub struct RunOutput {
    pub result: RunResult,
    /// Present for accuracy runs: the quality-gate evaluation.
    pub metric: Option<MetricResult>,
}

struct PendingQuery {
    issue_ts_ns: u64,
    sample_index: usize,
}

#[derive(Default)]
struct TrackerState {
    pending: HashMap<u64, PendingQuery>,
    issue_order: Vec<usize>,
    latencies: Vec<u64>,
    issued: u64,
    completed: u64,
    first_issue_ts: Option<u64>,
    last_completion_ts: u64,
    predictions: Vec<(usize, Prediction)>,
    /// First failure (backend failure completion, unknown query id,
    /// or log write error); poisons the run.
    fault: Option<String>,
    /// Set once the run is being closed; late completions are dropped
    /// instead of being written after the footer.
    closed: bool,
}

/// The completion sink for one run. All record appends stamp their
/// timestamp while holding the sink lock; state and sink locks nest
/// strictly state → sink.
struct Tracker {
    clock: Arc<dyn Clock>,
    sink: SharedSink,
    record_predictions: bool,
    state: Mutex<TrackerState>,
    cv: Condvar,
}

impl Tracker {
    fn new(clock: Arc<dyn Clock>, sink: SharedSink, record_predictions: bool) -> Arc<Self> {
        Arc::new(Tracker {
            clock,
            sink,
            record_predictions,
            state: Mutex::new(TrackerState::default()),
            cv: Condvar::new(),
        })
    }

    /// Stamp and append a record that is not racing completions
    /// (header, summaries, footer).
    fn append_now(&self, body: RecordBody) -> Result<()> {
        let mut sink = self.sink.lock().unwrap();
        let ts_ns = self.clock.now_ns();
        sink.append(&LogRecord {
            schema_version: SCHEMA_VERSION,
            ts_ns,
            body,
            extra: serde_json::Map::new(),
        })
    }

    /// Record an issue and register the query as pending. Returns the
    /// issue timestamp.
    fn log_issue(&self, query_id: u64, sample_index: usize) -> Result<u64> {
        let mut st = self.state.lock().unwrap();
        let ts_ns = {
            let mut sink = self.sink.lock().unwrap();
            let ts_ns = self.clock.now_ns();
            sink.append(&LogRecord {
                schema_version: SCHEMA_VERSION,
                ts_ns,
                body: RecordBody::Issue { query_id, sample_index },
                extra: serde_json::Map::new(),
            })?;
            ts_ns
        };
        st.pending.insert(query_id, PendingQuery { issue_ts_ns: ts_ns, sample_index });
        st.issue_order.push(sample_index);
        st.issued += 1;
        st.first_issue_ts.get_or_insert(ts_ns);
        Ok(ts_ns)
    }

    /// Wall clock so far by the reporting definition: first issue to
    /// latest completion.
    fn wall_so_far(st: &TrackerState) -> u64 {
        match st.first_issue_ts {
            Some(first) => st.last_completion_ts.saturating_sub(first),
            None => 0,
        }
    }

    /// Block until `done` holds, a fault is recorded, or `timeout` of
    /// real time passes. The timeout is wall time on purpose: it is the
    /// watchdog that catches a backend that never delivers, whatever
    /// clock the run itself is measured on.
    fn wait_for(&self, timeout: Duration, done: impl Fn(&TrackerState) -> bool) -> Result<()> {
        let deadline = Instant::now() + timeout;
        let mut st = self.state.lock().unwrap();
        loop {
            if let Some(fault) = &st.fault {
                return Err(HarnessError::RunInvalid(fault.clone()));
            }
            if done(&st) {
                return Ok(());
            }
            if Instant::now() >= deadline {
                return Err(HarnessError::RunInvalid(format!(
                    "timed out after {} ms waiting for completions ({} of {} issued queries done)",
                    timeout.as_millis(),
                    st.completed,
                    st.issued
                )));
            }
            let (guard, _) = self
                .cv
                .wait_timeout(st, Duration::from_millis(5))
                .unwrap();
            st = guard;
        }
    }
}

impl CompletionSink for Tracker {
    fn on_complete(&self, completion: Completion) {
        let mut st = self.state.lock().unwrap();
        if st.closed {
            return;
        }
        let Some(pending) = st.pending.remove(&completion.query_id) else {
            st.fault.get_or_insert(format!(
                "completion for unknown or already-completed query {}",
                completion.query_id
            ));
            drop(st);
            self.cv.notify_all();
            return;
        };
        let logged_prediction = if self.record_predictions
            && completion.status == CompletionStatus::Success
        {
            completion.prediction.clone()
        } else {
            None
        };
        let append = {
            let mut sink = self.sink.lock().unwrap();
            let ts_ns = self.clock.now_ns();
            let latency_ns = ts_ns.saturating_sub(pending.issue_ts_ns);
            sink.append(&LogRecord {
                schema_version: SCHEMA_VERSION,
                ts_ns,
                body: RecordBody::Completion {
                    query_id: completion.query_id,
                    latency_ns,
                    status: completion.status,
                    failure_reason: completion.failure_reason.clone(),
                    prediction: logged_prediction,
                },
                extra: serde_json::Map::new(),
            })
            .map(|_| (ts_ns, latency_ns))
        };
        match append {
            Ok((ts_ns, latency_ns)) => {
                st.completed += 1;
                st.latencies.push(latency_ns);
                st.last_completion_ts = st.last_completion_ts.max(ts_ns);
                match completion.status {
                    CompletionStatus::Success => {
                        if self.record_predictions {
                            if let Some(p) = completion.prediction {
                                st.predictions.push((pending.sample_index, p));
                            }
                        }
                    }
                    CompletionStatus::Failure => {
                        st.fault.get_or_insert(format!(
                            "query {} failed: {}",
                            completion.query_id,
                            completion.failure_reason.as_deref().unwrap_or("unspecified")
                        ));
                    }
                }
            }
            Err(e) => {
                st.fault.get_or_insert(format!("log write failed: {e}"));
            }
        }
        drop(st);
        self.cv.notify_all();
    }
}

/// Drive one run: header, scenario-shaped issue/wait loop, summary,
/// footer. Returns the run's reportable result, or an error with an
/// explicitly invalid footer already written.
pub fn execute_run(
    spec: &RunSpec,
    backend: &Arc<dyn Backend>,
    clock: &Arc<dyn Clock>,
    sink: &SharedSink,
) -> Result<RunOutput> {
    let settings = &spec.settings;
    settings
        .validate()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let plan = SamplePlan::new(
        settings.mode,
        settings.seed,
        spec.dataset_size,
        settings.performance_sample_count,
    )
    .map_err(|e| HarnessError::Config(e.to_string()))?;
    for &idx in plan.loadable_indices() {
        if !spec.inputs.contains_key(&idx) {
            return Err(HarnessError::Config(format!(
                "no preprocessed input for sample index {idx}"
            )));
        }
        if idx >= spec.ground_truth.len() {
            return Err(HarnessError::Config(format!(
                "no ground truth for sample index {idx}"
            )));
        }
    }

    let tracker = Tracker::new(
        clock.clone(),
        sink.clone(),
        settings.mode == Mode::Accuracy,
    );
    tracker.append_now(RecordBody::RunHeader {
        benchmark_id: spec.benchmark_id,
        scenario: settings.scenario,
        mode: settings.mode,
        seed: settings.seed,
        min_query_count: settings.min_query_count,
        min_duration_ms: settings.min_duration_ms,
        performance_sample_count: settings.performance_sample_count,
        dataset_size: spec.dataset_size,
    })?;
    backend.begin_run(tracker.clone())?;

    let timeout = Duration::from_millis(settings.query_timeout_ms);
    let drive = drive_queries(spec, &plan, backend, &tracker, timeout);

    // Drain the backend before closing the log so in-flight completions
    // land ahead of the footer. A timed-out query would make the join
    // block for its full latency, so that path skips the drain and the
    // late completion is dropped by the closed flag instead.
    let timed_out = matches!(&drive, Err(HarnessError::RunInvalid(m)) if m.starts_with("timed out"));
    if !timed_out {
        backend.end_run()?;
    }

    let mut st = tracker.state.lock().unwrap();
    st.closed = true;
    let issued = st.issued;
    let completed = st.completed;
    let digest = sequence_digest(&st.issue_order);
    let wall_time_ns = Tracker::wall_so_far(&st);
    let latencies = std::mem::take(&mut st.latencies);
    let predictions = std::mem::take(&mut st.predictions);
    drop(st);

    let close_invalid = |reason: String| -> Result<()> {
        tracker.append_now(RecordBody::RunFooter {
            issued_count: issued,
            completed_count: completed,
            sample_sequence_digest: digest,
            valid: false,
            invalid_reason: Some(reason),
        })
    };

    if let Err(e) = drive {
        close_invalid(e.to_string())?;
        return Err(e);
    }

    let result = match settings.scenario {
        Scenario::SingleStream => {
            RunResult::single_stream(settings.mode, issued, completed, wall_time_ns, &latencies, digest)
                .map_err(|e| HarnessError::RunInvalid(e.to_string()))?
        }
        Scenario::Offline => RunResult::offline(settings.mode, issued, completed, wall_time_ns, digest),
    };

    let metric = match settings.mode {
        Mode::Accuracy => {
            let mut preds = Vec::with_capacity(predictions.len());
            let mut gts = Vec::with_capacity(predictions.len());
            for (sample_index, pred) in predictions {
                preds.push(pred);
                gts.push(spec.ground_truth[sample_index].clone());
            }
            let value = match evaluate_accuracy(spec.benchmark_id, &preds, &gts) {
                Ok(fraction) => fraction * 100.0,
                Err(e) => {
                    let reason = format!("accuracy evaluation failed: {e}");
                    close_invalid(reason.clone())?;
                    return Err(HarnessError::RunInvalid(reason));
                }
            };
            let metric = evaluate_quality(value, spec.quality_target);
            tracker.append_now(RecordBody::AccuracySummary {
                metric: metric.metric.clone(),
                value_percent: metric.value,
                threshold_percent: metric.threshold_used,
                passed: metric.passed,
                samples_evaluated: preds.len() as u64,
            })?;
            Some(metric)
        }
        Mode::Performance => {
            tracker.append_now(RecordBody::PerformanceSummary {
                issued_count: result.issued_count,
                completed_count: result.completed_count,
                wall_time_ns: result.wall_time_ns,
                latency_p90_ns: result.latency_p90_ns,
                throughput_sps: result.throughput_sps,
            })?;
            None
        }
    };

    tracker.append_now(RecordBody::RunFooter {
        issued_count: issued,
        completed_count: completed,
        sample_sequence_digest: digest,
        valid: true,
        invalid_reason: None,
    })?;
    Ok(RunOutput { result, metric })
}

/// The scenario-shaped issue loop. Returns once every issued query has
/// completed successfully, or with the fault that stopped the run.
fn drive_queries(
    spec: &RunSpec,
    plan: &SamplePlan,
    backend: &Arc<dyn Backend>,
    tracker: &Arc<Tracker>,
    timeout: Duration,
) -> Result<()> {
    let settings = &spec.settings;
    let mut iter = plan.iter();
    match settings.scenario {
        Scenario::SingleStream => {
            let mut issued: u64 = 0;
            loop {
                let enough = match plan.fixed_len() {
                    // accuracy: one full pass
                    Some(len) => issued as usize >= len,
                    // performance: conjunctive stop — both the query
                    // floor and the duration floor must be met
                    None => {
                        let st = tracker.state.lock().unwrap();
                        issued >= settings.min_query_count
                            && Tracker::wall_so_far(&st) >= settings.min_duration_ns()
                    }
                };
                if enough {
                    break;
                }
                let sample_index = iter.next().expect("performance streams are unbounded");
                let input = &spec.inputs[&sample_index];
                let ts = tracker.log_issue(issued, sample_index)?;
                backend.issue(
                    QuerySample { query_id: issued, sample_index, issue_ts_ns: ts },
                    input,
                )?;
                issued += 1;
                backend.flush()?;
                let want = issued;
                tracker.wait_for(timeout, |st| st.completed >= want)?;
            }
            Ok(())
        }
        Scenario::Offline => {
            let count = match plan.fixed_len() {
                Some(len) => len as u64,
                None => settings.min_query_count,
            };
            for query_id in 0..count {
                let sample_index = iter.next().expect("performance streams are unbounded");
                let input = &spec.inputs[&sample_index];
                let ts = tracker.log_issue(query_id, sample_index)?;
                backend.issue(
                    QuerySample { query_id, sample_index, issue_ts_ns: ts },
                    input,
                )?;
            }
            backend.flush()?;
            tracker.wait_for(timeout, |st| st.completed >= count && st.pending.is_empty())
        }
    }
}

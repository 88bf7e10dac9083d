//! Synthetic backends: configurable latency models plus scripted or
//! ground-truth-echo predictions, standing in for real inference
//! engines. Two time bases are supported — real sleeping worker
//! threads, and a virtual clock advanced by event replay so large runs
//! finish instantly.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, BTreeMap};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use inferbench_core::model::ModelDescriptor;
use inferbench_core::predict::{GroundTruth, Prediction};
use inferbench_core::rng::SplitMix64;
use inferbench_core::run::QuerySample;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, Completion, CompletionSink};
use crate::clock::{Clock, ClockHandle, VirtualClock};
use crate::dataset::PreprocessedSample;
use crate::error::{HarnessError, Result};

/// How long a synthetic query takes, in nanoseconds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum LatencyModel {
    Constant { ns: u64 },
    /// Uniform draw in [lo_ns, hi_ns], from the backend's own seeded
    /// generator; the n-th issued query gets the n-th draw.
    UniformRange { lo_ns: u64, hi_ns: u64 },
    /// Cycles through the list; query n takes ns[n mod len].
    Trace { ns: Vec<u64> },
}

/// What the backend answers with.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AccuracyScript {
    /// Echo the dataset's ground truth as a perfect prediction.
    #[default]
    FromManifestGroundTruth,
    /// Fixed predictions per sample index; indices without an entry
    /// produce failure completions.
    Scripted { predictions: BTreeMap<usize, Prediction> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticBackendConfig {
    pub latency_model: LatencyModel,
    #[serde(default)]
    pub accuracy_script: AccuracyScript,
    /// Concurrent in-flight queries serviced in offline bursts.
    #[serde(default = "default_parallelism")]
    pub parallelism: u32,
    /// Seed for the UniformRange draw stream.
    #[serde(default)]
    pub latency_seed: u64,
}

fn default_parallelism() -> u32 {
    1
}

impl SyntheticBackendConfig {
    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            return Err(HarnessError::Backend("parallelism must be at least 1".into()));
        }
        match &self.latency_model {
            LatencyModel::UniformRange { lo_ns, hi_ns } if lo_ns > hi_ns => Err(
                HarnessError::Backend(format!("uniform range is empty: lo {lo_ns} > hi {hi_ns}")),
            ),
            LatencyModel::Trace { ns } if ns.is_empty() => {
                Err(HarnessError::Backend("latency trace is empty".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Convert ground truth into the prediction a perfect model would give.
pub fn echo_prediction(gt: &GroundTruth) -> Prediction {
    match gt {
        GroundTruth::Label { class_id } => {
            let mut scores = vec![0.0; *class_id as usize + 1];
            scores[*class_id as usize] = 1.0;
            Prediction::ClassScores { scores }
        }
        GroundTruth::Boxes { boxes } => {
            let boxes = boxes
                .iter()
                .map(|b| {
                    let mut b = b.clone();
                    b.score = Some(1.0);
                    b
                })
                .collect();
            Prediction::Detections { boxes }
        }
        GroundTruth::Mask { mask } => Prediction::Mask { mask: mask.clone() },
        GroundTruth::Answers { texts } => Prediction::AnswerSpan {
            text: texts.first().cloned().unwrap_or_default(),
        },
    }
}

struct Job {
    completion: Completion,
    latency_ns: u64,
}

/// A scheduled virtual-time completion, ordered by delivery time.
struct PendingEvent {
    done_ns: u64,
    seq: u64,
    completion: Completion,
}

impl PartialEq for PendingEvent {
    fn eq(&self, other: &Self) -> bool {
        (self.done_ns, self.seq) == (other.done_ns, other.seq)
    }
}
impl Eq for PendingEvent {}
impl PartialOrd for PendingEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PendingEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.done_ns, self.seq).cmp(&(other.done_ns, other.seq))
    }
}

enum RunMode {
    /// Real time: worker threads pull jobs off a shared queue and sleep.
    Sleep {
        tx: mpsc::Sender<Job>,
        workers: Vec<JoinHandle<()>>,
    },
    /// Simulated time: issues book completions onto service lanes;
    /// flush replays them in delivery order, advancing the clock.
    Virtual {
        clock: Arc<VirtualClock>,
        sink: Arc<dyn CompletionSink>,
        lanes: Vec<u64>,
        pending: BinaryHeap<Reverse<PendingEvent>>,
        seq: u64,
    },
}

struct RunState {
    mode: RunMode,
    issue_counter: u64,
    rng: SplitMix64,
}

pub struct SyntheticBackend {
    descriptor: ModelDescriptor,
    config: SyntheticBackendConfig,
    ground_truth: Arc<Vec<GroundTruth>>,
    clock: ClockHandle,
    run: Mutex<Option<RunState>>,
}

impl SyntheticBackend {
    fn latency_for(&self, issue_index: u64, rng: &mut SplitMix64) -> u64 {
        match &self.config.latency_model {
            LatencyModel::Constant { ns } => *ns,
            LatencyModel::UniformRange { lo_ns, hi_ns } => {
                lo_ns + rng.next_below(hi_ns - lo_ns + 1)
            }
            LatencyModel::Trace { ns } => ns[(issue_index % ns.len() as u64) as usize],
        }
    }

    fn prediction_for(&self, query: &QuerySample) -> Completion {
        match &self.config.accuracy_script {
            AccuracyScript::FromManifestGroundTruth => {
                match self.ground_truth.get(query.sample_index) {
                    Some(gt) => Completion::success(query.query_id, echo_prediction(gt)),
                    None => Completion::failure(
                        query.query_id,
                        format!("sample index {} out of range", query.sample_index),
                    ),
                }
            }
            AccuracyScript::Scripted { predictions } => {
                match predictions.get(&query.sample_index) {
                    Some(p) => Completion::success(query.query_id, p.clone()),
                    None => Completion::failure(query.query_id, "no scripted output"),
                }
            }
        }
    }
}

impl Backend for SyntheticBackend {
    fn descriptor(&self) -> &ModelDescriptor {
        &self.descriptor
    }

    fn begin_run(&self, sink: Arc<dyn CompletionSink>) -> Result<()> {
        let mut run = self.run.lock().unwrap();
        if run.is_some() {
            return Err(HarnessError::Backend("backend is already serving a run".into()));
        }
        let mode = match &self.clock {
            ClockHandle::Virtual(clock) => RunMode::Virtual {
                clock: clock.clone(),
                sink,
                lanes: vec![0; self.config.parallelism as usize],
                pending: BinaryHeap::new(),
                seq: 0,
            },
            ClockHandle::Monotonic(clock) => {
                let (tx, rx) = mpsc::channel::<Job>();
                let rx = Arc::new(Mutex::new(rx));
                let workers = (0..self.config.parallelism)
                    .map(|_| {
                        let rx = Arc::clone(&rx);
                        let sink = Arc::clone(&sink);
                        let clock: Arc<dyn Clock> = clock.clone();
                        std::thread::spawn(move || loop {
                            // hold the queue lock only for the pickup,
                            // never across the sleep
                            let job = { rx.lock().unwrap().recv() };
                            match job {
                                Ok(job) => {
                                    clock.sleep(Duration::from_nanos(job.latency_ns));
                                    sink.on_complete(job.completion);
                                }
                                Err(_) => break,
                            }
                        })
                    })
                    .collect();
                RunMode::Sleep { tx, workers }
            }
        };
        *run = Some(RunState {
            mode,
            issue_counter: 0,
            rng: SplitMix64::new(self.config.latency_seed),
        });
        Ok(())
    }

    fn issue(&self, query: QuerySample, _input: &PreprocessedSample) -> Result<()> {
        let mut run = self.run.lock().unwrap();
        let state = run
            .as_mut()
            .ok_or_else(|| HarnessError::Backend("issue outside an active run".into()))?;
        let latency_ns = self.latency_for(state.issue_counter, &mut state.rng);
        state.issue_counter += 1;
        let completion = self.prediction_for(&query);
        match &mut state.mode {
            RunMode::Sleep { tx, .. } => tx
                .send(Job { completion, latency_ns })
                .map_err(|_| HarnessError::Backend("worker pool is gone".into())),
            RunMode::Virtual { clock, lanes, pending, seq, .. } => {
                let lane = (0..lanes.len()).min_by_key(|&i| lanes[i]).expect("parallelism >= 1");
                let start = lanes[lane].max(clock.now_ns());
                let done_ns = start + latency_ns;
                lanes[lane] = done_ns;
                pending.push(Reverse(PendingEvent { done_ns, seq: *seq, completion }));
                *seq += 1;
                Ok(())
            }
        }
    }

    fn flush(&self) -> Result<()> {
        let mut run = self.run.lock().unwrap();
        let state = run
            .as_mut()
            .ok_or_else(|| HarnessError::Backend("flush outside an active run".into()))?;
        if let RunMode::Virtual { clock, sink, pending, .. } = &mut state.mode {
            // deliver in completion order, moving time to each event
            while let Some(Reverse(event)) = pending.pop() {
                clock.advance_to(event.done_ns);
                sink.on_complete(event.completion);
            }
        }
        Ok(())
    }

    fn end_run(&self) -> Result<()> {
        let state = self
            .run
            .lock()
            .unwrap()
            .take()
            .ok_or_else(|| HarnessError::Backend("end_run outside an active run".into()))?;
        if let RunMode::Sleep { tx, workers } = state.mode {
            drop(tx);
            for worker in workers {
                worker.join().map_err(|_| HarnessError::Backend("worker panicked".into()))?;
            }
        }
        Ok(())
    }
}

/// Build a synthetic backend for the descriptor. Loading is stateless,
/// so repeated loads of the same descriptor behave identically.
pub fn load_backend(
    descriptor: &ModelDescriptor,
    config: &SyntheticBackendConfig,
    ground_truth: Arc<Vec<GroundTruth>>,
    clock: &ClockHandle,
) -> Result<Arc<dyn Backend>> {
    descriptor
        .validate()
        .map_err(|e| HarnessError::Backend(e.to_string()))?;
    config.validate()?;
    Ok(Arc::new(SyntheticBackend {
        descriptor: descriptor.clone(),
        config: config.clone(),
        ground_truth,
        clock: clock.clone(),
        run: Mutex::new(None),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use inferbench_core::benchmark::BenchmarkId;
    use inferbench_core::record::CompletionStatus;

    struct Collector {
        completions: Mutex<Vec<Completion>>,
    }

    impl Collector {
        fn new() -> Arc<Self> {
            Arc::new(Collector { completions: Mutex::new(Vec::new()) })
        }
        fn take(&self) -> Vec<Completion> {
            std::mem::take(&mut self.completions.lock().unwrap())
        }
    }

    impl CompletionSink for Collector {
        fn on_complete(&self, completion: Completion) {
            self.completions.lock().unwrap().push(completion);
        }
    }

    fn dummy_input() -> PreprocessedSample {
        PreprocessedSample {
            benchmark_id: BenchmarkId::QuestionAnswering,
            data: crate::dataset::SampleData::Tokens(vec![1, 2, 3]),
        }
    }

    fn query(id: u64, sample: usize) -> QuerySample {
        QuerySample { query_id: id, sample_index: sample, issue_ts_ns: 0 }
    }

    fn label_gt(classes: &[u32]) -> Arc<Vec<GroundTruth>> {
        Arc::new(classes.iter().map(|&c| GroundTruth::Label { class_id: c }).collect())
    }

    fn descriptor() -> ModelDescriptor {
        ModelDescriptor::canonical(
            BenchmarkId::ImageClassification,
            inferbench_core::model::Precision::Fp32,
            "synthetic://test",
        )
    }

    #[test]
    fn echo_script_reproduces_ground_truth_argmax() {
        let clock = ClockHandle::new_virtual();
        let backend = load_backend(
            &descriptor(),
            &SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 1_000 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 1,
                latency_seed: 0,
            },
            label_gt(&[5, 2]),
            &clock,
        )
        .unwrap();
        let sink = Collector::new();
        backend.begin_run(sink.clone()).unwrap();
        backend.issue(query(0, 1), &dummy_input()).unwrap();
        backend.flush().unwrap();
        backend.end_run().unwrap();
        let got = sink.take();
        assert_eq!(got.len(), 1);
        match got[0].prediction.as_ref().unwrap() {
            Prediction::ClassScores { scores } => {
                assert_eq!(scores.len(), 3);
                assert_eq!(scores[2], 1.0);
            }
            other => panic!("unexpected prediction {other:?}"),
        }
    }

    #[test]
    fn unscripted_index_fails_the_query() {
        let clock = ClockHandle::new_virtual();
        let backend = load_backend(
            &descriptor(),
            &SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 1 },
                accuracy_script: AccuracyScript::Scripted {
                    predictions: BTreeMap::from([(
                        7,
                        Prediction::ClassScores { scores: vec![0.0, 1.0] },
                    )]),
                },
                parallelism: 1,
                latency_seed: 0,
            },
            label_gt(&[]),
            &clock,
        )
        .unwrap();
        let sink = Collector::new();
        backend.begin_run(sink.clone()).unwrap();
        backend.issue(query(0, 7), &dummy_input()).unwrap();
        backend.issue(query(1, 8), &dummy_input()).unwrap();
        backend.flush().unwrap();
        backend.end_run().unwrap();
        let got = sink.take();
        assert_eq!(got[0].status, CompletionStatus::Success);
        assert_eq!(got[1].status, CompletionStatus::Failure);
        assert_eq!(got[1].failure_reason.as_deref(), Some("no scripted output"));
    }

    #[test]
    fn virtual_trace_cycles_and_advances_the_clock() {
        let clock = ClockHandle::new_virtual();
        let ClockHandle::Virtual(vc) = &clock else { unreachable!() };
        let backend = load_backend(
            &descriptor(),
            &SyntheticBackendConfig {
                latency_model: LatencyModel::Trace { ns: vec![3, 1, 2] },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 1,
                latency_seed: 0,
            },
            label_gt(&[0, 0, 0, 0, 0]),
            &clock,
        )
        .unwrap();
        let sink = Collector::new();
        backend.begin_run(sink.clone()).unwrap();
        // single-stream shape: issue, then flush before the wait
        let mut dones = Vec::new();
        for i in 0..5 {
            backend.issue(query(i, 0), &dummy_input()).unwrap();
            backend.flush().unwrap();
            dones.push(vc.now_ns());
        }
        backend.end_run().unwrap();
        // trace 3,1,2 cycles: cumulative 3, 4, 6, 9, 10
        assert_eq!(dones, vec![3, 4, 6, 9, 10]);
        assert_eq!(sink.take().len(), 5);
    }

    #[test]
    fn virtual_offline_lanes_pipeline_the_burst() {
        let clock = ClockHandle::new_virtual();
        let ClockHandle::Virtual(vc) = &clock else { unreachable!() };
        let backend = load_backend(
            &descriptor(),
            &SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 10_000_000 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 4,
                latency_seed: 0,
            },
            label_gt(&[0]),
            &clock,
        )
        .unwrap();
        let sink = Collector::new();
        backend.begin_run(sink.clone()).unwrap();
        for i in 0..40 {
            backend.issue(query(i, 0), &dummy_input()).unwrap();
        }
        backend.flush().unwrap();
        backend.end_run().unwrap();
        // 40 jobs over 4 lanes of 10 ms each: last completion at 100 ms
        assert_eq!(vc.now_ns(), 100_000_000);
        assert_eq!(sink.take().len(), 40);
    }

    #[test]
    fn sleeping_workers_deliver_exactly_once() {
        let clock = ClockHandle::new_monotonic();
        let backend = load_backend(
            &descriptor(),
            &SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 200_000 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 4,
                latency_seed: 0,
            },
            label_gt(&[1, 2, 3]),
            &clock,
        )
        .unwrap();
        let sink = Collector::new();
        backend.begin_run(sink.clone()).unwrap();
        for i in 0..12 {
            backend.issue(query(i, (i % 3) as usize), &dummy_input()).unwrap();
        }
        backend.flush().unwrap();
        backend.end_run().unwrap(); // join waits for the queue to drain
        let mut ids: Vec<u64> = sink.take().iter().map(|c| c.query_id).collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn uniform_draws_are_seed_deterministic_and_bounded() {
        let run = |seed: u64| -> Vec<u64> {
            let clock = ClockHandle::new_virtual();
            let ClockHandle::Virtual(vc) = &clock else { unreachable!() };
            let backend = load_backend(
                &descriptor(),
                &SyntheticBackendConfig {
                    latency_model: LatencyModel::UniformRange { lo_ns: 100, hi_ns: 200 },
                    accuracy_script: AccuracyScript::FromManifestGroundTruth,
                    parallelism: 1,
                    latency_seed: seed,
                },
                label_gt(&[0]),
                &clock,
            )
            .unwrap();
            let sink = Collector::new();
            backend.begin_run(sink).unwrap();
            let mut times = Vec::new();
            for i in 0..8 {
                backend.issue(query(i, 0), &dummy_input()).unwrap();
                backend.flush().unwrap();
                times.push(vc.now_ns());
            }
            backend.end_run().unwrap();
            times
        };
        let a = run(9);
        let b = run(9);
        let c = run(10);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let mut prev = 0;
        for t in a {
            let latency = t - prev;
            assert!((100..=200).contains(&latency), "latency {latency} out of range");
            prev = t;
        }
    }

    #[test]
    fn second_begin_run_is_rejected_until_end_run() {
        let clock = ClockHandle::new_virtual();
        let backend = load_backend(
            &descriptor(),
            &SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 1 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 1,
                latency_seed: 0,
            },
            label_gt(&[0]),
            &clock,
        )
        .unwrap();
        let sink = Collector::new();
        backend.begin_run(sink.clone()).unwrap();
        assert!(backend.begin_run(sink.clone()).is_err());
        backend.end_run().unwrap();
        backend.begin_run(sink).unwrap();
        backend.end_run().unwrap();
    }

    #[test]
    fn invalid_configs_are_rejected_at_load() {
        let clock = ClockHandle::new_virtual();
        let bad = [
            SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 1 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 0,
                latency_seed: 0,
            },
            SyntheticBackendConfig {
                latency_model: LatencyModel::Trace { ns: vec![] },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 1,
                latency_seed: 0,
            },
            SyntheticBackendConfig {
                latency_model: LatencyModel::UniformRange { lo_ns: 5, hi_ns: 4 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: 1,
                latency_seed: 0,
            },
        ];
        for config in bad {
            assert!(load_backend(&descriptor(), &config, label_gt(&[]), &clock).is_err());
        }
    }
}

//! Suite orchestration: for each configured benchmark, an accuracy
//! run over the whole dataset and then a performance run over the
//! seeded subset, with cooldown pauses between benchmarks and one log
//! file per benchmark.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use inferbench_core::benchmark::{BenchmarkId, Mode, Scenario};
use inferbench_core::quality::MetricResult;
use inferbench_core::run::RunResult;

use crate::clock::ClockHandle;
use crate::config::{ClockKind, ResolvedBenchmark, SuiteConfig};
use crate::dataset::Dataset;
use crate::error::{HarnessError, Result};
use crate::loadgen::{execute_run, RunSpec, SharedSink};
use crate::logio::FileLogSink;
use crate::synthetic::load_backend;

pub struct BenchmarkOutcome {
    pub benchmark_id: BenchmarkId,
    pub scenario: Scenario,
    pub log_file: String,
    pub accuracy: MetricResult,
    pub accuracy_digest: u64,
    pub performance: RunResult,
}

pub struct SuiteOutcome {
    pub benchmarks: Vec<BenchmarkOutcome>,
}

impl SuiteOutcome {
    pub fn all_gates_passed(&self) -> bool {
        self.benchmarks.iter().all(|b| b.accuracy.passed)
    }
}

/// Log file name for the i-th benchmark; the numeric prefix makes
/// lexical directory order equal suite order.
pub fn log_file_name(index: usize, benchmark_id: BenchmarkId, scenario: Scenario) -> String {
    format!("{index:02}_{benchmark_id}_{scenario}.ndjson")
}

/// Execute every configured benchmark. Stops at the first invalid run;
/// quality-gate failures do not stop the suite (they are reported and
/// reflected in the exit code).
pub fn run_suite(
    config: &SuiteConfig,
    config_dir: &Path,
    out_dir: &Path,
    full_rules_flag: bool,
    max_cooldown_ms: Option<u64>,
) -> Result<SuiteOutcome> {
    let resolved = config.resolve(config_dir, full_rules_flag, max_cooldown_ms)?;
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;

    let clock = match config.clock {
        ClockKind::Monotonic => ClockHandle::new_monotonic(),
        ClockKind::Virtual => ClockHandle::new_virtual(),
    };

    let mut outcomes = Vec::with_capacity(resolved.len());
    for (index, bench) in resolved.iter().enumerate() {
        if index > 0 && bench.cooldown_ms > 0 {
            clock
                .as_clock()
                .sleep(Duration::from_millis(bench.cooldown_ms));
        }
        outcomes.push(run_benchmark(index, bench, out_dir, &clock)?);
    }
    Ok(SuiteOutcome { benchmarks: outcomes })
}

fn run_benchmark(
    index: usize,
    bench: &ResolvedBenchmark,
    out_dir: &Path,
    clock: &ClockHandle,
) -> Result<BenchmarkOutcome> {
    let dataset = Dataset::load(&bench.manifest_path)?;
    if dataset.benchmark_id() != bench.benchmark_id {
        return Err(HarnessError::Config(format!(
            "{}: manifest is for {}, benchmark entry is {}",
            bench.manifest_path.display(),
            dataset.benchmark_id(),
            bench.benchmark_id
        )));
    }
    let ground_truth = Arc::new(dataset.ground_truth_vec());
    let backend = load_backend(&bench.descriptor, &bench.backend, ground_truth.clone(), clock)?;

    let file_name = log_file_name(index, bench.benchmark_id, bench.scenario);
    let log_path: PathBuf = out_dir.join(&file_name);
    let sink: SharedSink = Arc::new(Mutex::new(FileLogSink::create(&log_path)?));

    // accuracy first: the whole dataset, predictions logged
    let acc_settings = bench.settings(Mode::Accuracy, dataset.len());
    let all_indices: Vec<usize> = (0..dataset.len()).collect();
    let acc_inputs = dataset.preload(&all_indices)?;
    let acc_out = execute_run(
        &RunSpec {
            benchmark_id: bench.benchmark_id,
            settings: acc_settings,
            dataset_size: dataset.len(),
            quality_target: &bench.quality_target,
            inputs: &acc_inputs,
            ground_truth: &ground_truth,
        },
        &backend,
        &clock.as_clock(),
        &sink,
    )?;
    drop(acc_inputs);

    // then performance: the seeded subset only
    let perf_settings = bench.settings(Mode::Performance, dataset.len());
    let plan = inferbench_core::rng::SamplePlan::new(
        Mode::Performance,
        perf_settings.seed,
        dataset.len(),
        perf_settings.performance_sample_count,
    )
    .map_err(|e| HarnessError::Config(e.to_string()))?;
    let perf_inputs = dataset.preload(plan.loadable_indices())?;
    let perf_out = execute_run(
        &RunSpec {
            benchmark_id: bench.benchmark_id,
            settings: perf_settings,
            dataset_size: dataset.len(),
            quality_target: &bench.quality_target,
            inputs: &perf_inputs,
            ground_truth: &ground_truth,
        },
        &backend,
        &clock.as_clock(),
        &sink,
    )?;

    sink.lock().unwrap().finish()?;

    Ok(BenchmarkOutcome {
        benchmark_id: bench.benchmark_id,
        scenario: bench.scenario,
        log_file: file_name,
        accuracy: acc_out.metric.expect("accuracy runs produce a metric"),
        accuracy_digest: acc_out.result.sample_sequence_digest,
        performance: perf_out.result,
    })
}

/// Shared fixtures for this crate's tests: a tiny on-disk
/// classification dataset and a two-scenario desk-scale config.
#[cfg(test)]
pub mod tests_support {
    use super::*;
    use crate::config::{BenchmarkEntry, SettingsOverride};
    use crate::dataset::{DatasetManifest, SampleEntry};
    use crate::synthetic::{AccuracyScript, LatencyModel, SyntheticBackendConfig};
    use inferbench_core::predict::GroundTruth;
    use inferbench_core::tensor::ImageTensor;

    pub fn write_classification_dataset(dir: &Path, n: usize) -> PathBuf {
        let mut samples = Vec::new();
        for i in 0..n {
            let file = format!("img_{i:02}.bin");
            let value = i as f32 / n as f32;
            let img = ImageTensor::new(32, 48, 3, vec![value; 32 * 48 * 3]).unwrap();
            std::fs::write(dir.join(&file), img.to_blob()).unwrap();
            samples.push(SampleEntry {
                input_uri: Some(file),
                tokens: None,
                ground_truth: GroundTruth::Label { class_id: (i % 5) as u32 },
            });
        }
        let manifest = DatasetManifest {
            benchmark_id: BenchmarkId::ImageClassification,
            normalization: None,
            samples,
        };
        let path = dir.join("classification.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
        path
    }

    pub fn classification_entry(scenario: Scenario) -> BenchmarkEntry {
        BenchmarkEntry {
            benchmark_id: BenchmarkId::ImageClassification,
            scenario,
            dataset_manifest: PathBuf::from("classification.json"),
            backend: SyntheticBackendConfig {
                latency_model: LatencyModel::Constant { ns: 2_000_000 },
                accuracy_script: AccuracyScript::FromManifestGroundTruth,
                parallelism: if scenario == Scenario::Offline { 2 } else { 1 },
                latency_seed: 0,
            },
            precision: inferbench_core::model::Precision::Fp32,
            model_uri: "synthetic://echo".into(),
            settings: SettingsOverride {
                seed: Some(7),
                min_query_count: Some(10),
                ..SettingsOverride::default()
            },
            quality_target: None,
        }
    }

    /// Virtual-clock config exercising both scenarios over one dataset.
    pub fn desk_suite_config(dir: &Path) -> SuiteConfig {
        write_classification_dataset(dir, 6);
        SuiteConfig {
            schema_version: 1,
            full_rules: false,
            clock: ClockKind::Virtual,
            benchmarks: vec![
                classification_entry(Scenario::SingleStream),
                classification_entry(Scenario::Offline),
            ],
        }
    }
}

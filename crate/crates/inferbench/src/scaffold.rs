//! Starter fixtures for `init`: a ready-to-run desk-scale suite config
//! plus small synthetic datasets for every benchmark slot. Everything
//! is generated from fixed arithmetic, so two scaffolds are bit-equal.

use std::path::{Path, PathBuf};

use inferbench_core::benchmark::{BenchmarkId, Scenario, CANONICAL_SUITE_ORDER};
use inferbench_core::model::Precision;
use inferbench_core::predict::{DetectionBox, GroundTruth, SegMask};
use inferbench_core::tensor::ImageTensor;

use crate::config::{BenchmarkEntry, ClockKind, SettingsOverride, SuiteConfig, CONFIG_SCHEMA_VERSION};
use crate::dataset::{DatasetManifest, Normalization, SampleEntry};
use crate::error::{HarnessError, Result};
use crate::synthetic::{AccuracyScript, LatencyModel, SyntheticBackendConfig};

const DATA_DIR: &str = "data";
const CONFIG_FILE: &str = "config.json";

/// Write a runnable starter workspace under `dir` and return the path
/// of the generated config. Refuses to overwrite an existing config.
pub fn scaffold(dir: &Path) -> Result<PathBuf> {
    let config_path = dir.join(CONFIG_FILE);
    if config_path.exists() {
        return Err(HarnessError::Config(format!(
            "{} already exists; refusing to overwrite",
            config_path.display()
        )));
    }
    let data = dir.join(DATA_DIR);
    std::fs::create_dir_all(&data).map_err(|e| HarnessError::io(&data, e))?;

    write_manifest(&data, "classification.json", classification_manifest(&data)?)?;
    write_manifest(&data, "detection.json", detection_manifest(&data)?)?;
    write_manifest(&data, "segmentation.json", segmentation_manifest(&data)?)?;
    write_manifest(&data, "qa.json", qa_manifest())?;

    let config = starter_config();
    let text = serde_json::to_string_pretty(&config)
        .map_err(|e| HarnessError::Config(format!("serializing starter config: {e}")))?;
    std::fs::write(&config_path, text + "\n").map_err(|e| HarnessError::io(&config_path, e))?;
    Ok(config_path)
}

fn write_manifest(data: &Path, name: &str, manifest: DatasetManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| HarnessError::Config(format!("serializing {name}: {e}")))?;
    let path = data.join(name);
    std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;
    Ok(())
}

/// Smooth per-sample gradient image; sizes vary so the resize/crop
/// pipeline gets exercised rather than passed through.
fn write_image(data: &Path, file: &str, index: usize) -> Result<()> {
    let height = 40 + 8 * (index as u32 % 3);
    let width = 48 + 8 * (index as u32 % 4);
    let mut img = ImageTensor::zeros(height, width, 3).expect("small tensor");
    for y in 0..height {
        for x in 0..width {
            for c in 0..3 {
                let v = (index as f32 * 0.05
                    + y as f32 / height as f32
                    + x as f32 / width as f32
                    + c as f32 * 0.1)
                    .fract();
                img.set(y, x, c, v);
            }
        }
    }
    let path = data.join(file);
    std::fs::write(&path, img.to_blob()).map_err(|e| HarnessError::io(&path, e))?;
    Ok(())
}

fn classification_manifest(data: &Path) -> Result<DatasetManifest> {
    let mut samples = Vec::new();
    for i in 0..12usize {
        let file = format!("cls_{i:02}.bin");
        write_image(data, &file, i)?;
        samples.push(SampleEntry {
            input_uri: Some(file),
            tokens: None,
            ground_truth: GroundTruth::Label { class_id: (i % 7) as u32 },
        });
    }
    Ok(DatasetManifest {
        benchmark_id: BenchmarkId::ImageClassification,
        normalization: Some(Normalization {
            mean: vec![0.485, 0.456, 0.406],
            std: vec![0.229, 0.224, 0.225],
        }),
        samples,
    })
}

fn detection_manifest(data: &Path) -> Result<DatasetManifest> {
    let mut samples = Vec::new();
    for i in 0..8usize {
        let file = format!("det_{i:02}.bin");
        write_image(data, &file, i + 20)?;
        let mut boxes = Vec::new();
        for b in 0..(1 + i % 3) {
            let xmin = 10.0 + 25.0 * b as f64 + i as f64;
            let ymin = 12.0 + 20.0 * b as f64;
            boxes.push(DetectionBox {
                xmin,
                ymin,
                xmax: xmin + 40.0 + 5.0 * b as f64,
                ymax: ymin + 30.0,
                class_id: ((i + b) % 4) as u32,
                score: None,
            });
        }
        samples.push(SampleEntry {
            input_uri: Some(file),
            tokens: None,
            ground_truth: GroundTruth::Boxes { boxes },
        });
    }
    Ok(DatasetManifest {
        benchmark_id: BenchmarkId::ObjectDetection,
        normalization: None,
        samples,
    })
}

fn segmentation_manifest(data: &Path) -> Result<DatasetManifest> {
    let mut samples = Vec::new();
    for i in 0..6usize {
        let file = format!("seg_{i:02}.bin");
        write_image(data, &file, i + 40)?;
        // Quadrant pattern over classes 1..=4 with a band of the
        // excluded class 32, so the mIoU exclusion path is live.
        let (h, w) = (16u32, 16u32);
        let mut labels = Vec::with_capacity((h * w) as usize);
        for y in 0..h {
            for x in 0..w {
                let label = if y < 2 {
                    SegMask::EXCLUDED_CLASS
                } else {
                    let quadrant = (y >= h / 2) as u8 * 2 + (x >= w / 2) as u8;
                    1 + ((quadrant + i as u8) % 4)
                };
                labels.push(label);
            }
        }
        samples.push(SampleEntry {
            input_uri: Some(file),
            tokens: None,
            ground_truth: GroundTruth::Mask {
                mask: SegMask::new(h, w, labels).expect("labels in range"),
            },
        });
    }
    Ok(DatasetManifest {
        benchmark_id: BenchmarkId::Segmentation,
        normalization: None,
        samples,
    })
}

fn qa_manifest() -> DatasetManifest {
    let mut samples = Vec::new();
    for i in 0..8usize {
        // Lengths straddle the model limit so truncation is exercised.
        let len = 300 + 30 * i;
        let tokens: Vec<u32> = (0..len).map(|j| ((i * 31 + j * 7) % 30000) as u32).collect();
        samples.push(SampleEntry {
            input_uri: None,
            tokens: Some(tokens),
            ground_truth: GroundTruth::Answers {
                texts: vec![format!("answer {i}"), format!("the answer {i}")],
            },
        });
    }
    DatasetManifest {
        benchmark_id: BenchmarkId::QuestionAnswering,
        normalization: None,
        samples,
    }
}

fn starter_entry(benchmark_id: BenchmarkId, scenario: Scenario) -> BenchmarkEntry {
    let manifest = match benchmark_id {
        BenchmarkId::ImageClassification => "classification.json",
        BenchmarkId::ObjectDetection => "detection.json",
        BenchmarkId::Segmentation => "segmentation.json",
        BenchmarkId::QuestionAnswering => "qa.json",
    };
    let latency_model = match (benchmark_id, scenario) {
        (BenchmarkId::ImageClassification, Scenario::Offline) => {
            LatencyModel::Constant { ns: 1_500_000 }
        }
        (BenchmarkId::ImageClassification, _) => LatencyModel::Constant { ns: 2_000_000 },
        (BenchmarkId::ObjectDetection, _) => LatencyModel::UniformRange {
            lo_ns: 3_000_000,
            hi_ns: 5_000_000,
        },
        (BenchmarkId::Segmentation, _) => LatencyModel::Constant { ns: 4_000_000 },
        (BenchmarkId::QuestionAnswering, _) => {
            LatencyModel::Trace { ns: vec![2_000_000, 3_000_000, 2_500_000] }
        }
    };
    BenchmarkEntry {
        benchmark_id,
        scenario,
        dataset_manifest: PathBuf::from(DATA_DIR).join(manifest),
        backend: SyntheticBackendConfig {
            latency_model,
            accuracy_script: AccuracyScript::FromManifestGroundTruth,
            parallelism: if scenario == Scenario::Offline { 4 } else { 1 },
            latency_seed: 11,
        },
        precision: Precision::Fp32,
        model_uri: "synthetic://echo".into(),
        settings: SettingsOverride::default(),
        quality_target: None,
    }
}

/// Desk-scale defaults in the canonical benchmark order, so the same
/// file also parses (but does not pass) under full rules.
fn starter_config() -> SuiteConfig {
    SuiteConfig {
        schema_version: CONFIG_SCHEMA_VERSION,
        full_rules: false,
        clock: ClockKind::Monotonic,
        benchmarks: CANONICAL_SUITE_ORDER
            .iter()
            .map(|(b, s)| starter_entry(*b, *s))
            .collect(),
    }
}

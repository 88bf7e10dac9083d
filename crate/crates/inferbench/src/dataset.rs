//! Manifest-driven datasets: JSON manifests referencing binary image
//! blobs (or inline token sequences) plus per-sample ground truth, and
//! the canonical preprocessing that turns them into model inputs.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use inferbench_core::benchmark::BenchmarkId;
use inferbench_core::model::canonical_input_shape;
use inferbench_core::predict::GroundTruth;
use inferbench_core::preprocess::{canonical_image_pipeline, normalize, truncate_tokens, MAX_TOKENS};
use inferbench_core::tensor::ImageTensor;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Per-channel normalization constants, applied after the canonical
/// resize/crop stage when present in the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f32>,
    pub std: Vec<f32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleEntry {
    /// Image tasks: path to a tensor blob, relative to the manifest.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_uri: Option<String>,
    /// Question answering: tokenized input.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tokens: Option<Vec<u32>>,
    pub ground_truth: GroundTruth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub benchmark_id: BenchmarkId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normalization: Option<Normalization>,
    pub samples: Vec<SampleEntry>,
}

/// Model-ready input: preprocessing output for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedSample {
    pub benchmark_id: BenchmarkId,
    pub data: SampleData,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleData {
    Image(ImageTensor),
    Tokens(Vec<u32>),
}

/// A manifest bound to its directory, ready to load samples.
pub struct Dataset {
    manifest: DatasetManifest,
    base_dir: PathBuf,
}

impl Dataset {
    pub fn load(manifest_path: &Path) -> Result<Self> {
        let text = fs::read_to_string(manifest_path)
            .map_err(|e| HarnessError::io(manifest_path, e))?;
        let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| {
            HarnessError::Dataset(format!("{}: {e}", manifest_path.display()))
        })?;
        let base_dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let dataset = Dataset { manifest, base_dir };
        dataset.validate(manifest_path)?;
        Ok(dataset)
    }

    fn validate(&self, manifest_path: &Path) -> Result<()> {
        if self.manifest.samples.is_empty() {
            return Err(HarnessError::Dataset(format!(
                "{}: manifest has no samples",
                manifest_path.display()
            )));
        }
        for (i, sample) in self.manifest.samples.iter().enumerate() {
            if sample.ground_truth.benchmark() != self.manifest.benchmark_id {
                return Err(HarnessError::Dataset(format!(
                    "{}: sample {i} ground truth is for {}, manifest is for {}",
                    manifest_path.display(),
                    sample.ground_truth.benchmark(),
                    self.manifest.benchmark_id
                )));
            }
            let needs_tokens = self.manifest.benchmark_id == BenchmarkId::QuestionAnswering;
            if needs_tokens && sample.tokens.is_none() {
                return Err(HarnessError::Dataset(format!(
                    "{}: sample {i} has no token sequence",
                    manifest_path.display()
                )));
            }
            if !needs_tokens && sample.input_uri.is_none() {
                return Err(HarnessError::Dataset(format!(
                    "{}: sample {i} has no input_uri",
                    manifest_path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn benchmark_id(&self) -> BenchmarkId {
        self.manifest.benchmark_id
    }

    pub fn len(&self) -> usize {
        self.manifest.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.samples.is_empty()
    }

    pub fn ground_truth(&self, index: usize) -> Option<&GroundTruth> {
        self.manifest.samples.get(index).map(|s| &s.ground_truth)
    }

    /// Ground truth for every sample, in index order.
    pub fn ground_truth_vec(&self) -> Vec<GroundTruth> {
        self.manifest.samples.iter().map(|s| s.ground_truth.clone()).collect()
    }

    /// Load and preprocess one sample through the benchmark's canonical
    /// pipeline. Pure in (manifest, index): identical calls yield
    /// identical tensors.
    pub fn load_sample(&self, index: usize) -> Result<PreprocessedSample> {
        let sample = self.manifest.samples.get(index).ok_or_else(|| {
            HarnessError::Dataset(format!("sample index {index} out of range (dataset has {})", self.len()))
        })?;
        let benchmark = self.manifest.benchmark_id;
        let data = match benchmark {
            BenchmarkId::QuestionAnswering => {
                let tokens = sample.tokens.as_ref().expect("validated at load");
                SampleData::Tokens(truncate_tokens(tokens, MAX_TOKENS))
            }
            _ => {
                let uri = sample.input_uri.as_ref().expect("validated at load");
                let path = self.base_dir.join(uri);
                let blob = fs::read(&path).map_err(|e| HarnessError::io(&path, e))?;
                let raw = ImageTensor::from_blob(&blob).map_err(|e| {
                    HarnessError::Dataset(format!("{}: {e}", path.display()))
                })?;
                let mut img = canonical_image_pipeline(benchmark, &raw).map_err(|e| {
                    HarnessError::Dataset(format!("{}: {e}", path.display()))
                })?;
                if let Some(n) = &self.manifest.normalization {
                    img = normalize(&img, &n.mean, &n.std).map_err(|e| {
                        HarnessError::Dataset(format!("{}: {e}", path.display()))
                    })?;
                }
                let shape = [img.height, img.width, img.channels];
                if shape != canonical_input_shape(benchmark) {
                    return Err(HarnessError::Dataset(format!(
                        "sample {index}: preprocessed shape {shape:?} is not canonical"
                    )));
                }
                SampleData::Image(img)
            }
        };
        Ok(PreprocessedSample { benchmark_id: benchmark, data })
    }

    /// Preprocess the given sample indices once, for reuse across a run.
    pub fn preload(&self, indices: &[usize]) -> Result<HashMap<usize, Arc<PreprocessedSample>>> {
        let mut cache = HashMap::with_capacity(indices.len());
        for &i in indices {
            if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(i) {
                slot.insert(Arc::new(self.load_sample(i)?));
            }
        }
        Ok(cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use inferbench_core::predict::{DetectionBox, SegMask};

    fn write_manifest(dir: &Path, manifest: &DatasetManifest) -> PathBuf {
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(manifest).unwrap()).unwrap();
        path
    }

    #[test]
    fn classification_dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImageTensor::new(40, 50, 3, vec![0.5; 40 * 50 * 3]).unwrap();
        fs::write(dir.path().join("s0.bin"), img.to_blob()).unwrap();
        let manifest = DatasetManifest {
            benchmark_id: BenchmarkId::ImageClassification,
            normalization: None,
            samples: vec![SampleEntry {
                input_uri: Some("s0.bin".into()),
                tokens: None,
                ground_truth: GroundTruth::Label { class_id: 3 },
            }],
        };
        let path = write_manifest(dir.path(), &manifest);
        let ds = Dataset::load(&path).unwrap();
        assert_eq!(ds.len(), 1);
        let s = ds.load_sample(0).unwrap();
        match s.data {
            SampleData::Image(t) => {
                assert_eq!((t.height, t.width, t.channels), (224, 224, 3));
                // constant image stays constant through resize + crop
                assert!(t.data.iter().all(|v| (*v - 0.5).abs() < 1e-6));
            }
            _ => panic!("expected image"),
        }
        // purity: loading twice gives identical tensors
        assert_eq!(ds.load_sample(0).unwrap(), ds.load_sample(0).unwrap());
    }

    #[test]
    fn qa_dataset_truncates_tokens() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = DatasetManifest {
            benchmark_id: BenchmarkId::QuestionAnswering,
            normalization: None,
            samples: vec![SampleEntry {
                input_uri: None,
                tokens: Some((0..500).collect()),
                ground_truth: GroundTruth::Answers { texts: vec!["x".into()] },
            }],
        };
        let path = write_manifest(dir.path(), &manifest);
        let ds = Dataset::load(&path).unwrap();
        match ds.load_sample(0).unwrap().data {
            SampleData::Tokens(t) => assert_eq!(t.len(), 384),
            _ => panic!("expected tokens"),
        }
    }

    #[test]
    fn mismatched_ground_truth_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = DatasetManifest {
            benchmark_id: BenchmarkId::ImageClassification,
            normalization: None,
            samples: vec![SampleEntry {
                input_uri: Some("s0.bin".into()),
                tokens: None,
                ground_truth: GroundTruth::Boxes {
                    boxes: vec![DetectionBox { xmin: 0.0, ymin: 0.0, xmax: 1.0, ymax: 1.0, class_id: 1, score: None }],
                },
            }],
        };
        let path = write_manifest(dir.path(), &manifest);
        assert!(matches!(Dataset::load(&path), Err(HarnessError::Dataset(_))));
    }

    #[test]
    fn missing_blob_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = DatasetManifest {
            benchmark_id: BenchmarkId::Segmentation,
            normalization: None,
            samples: vec![SampleEntry {
                input_uri: Some("absent.bin".into()),
                tokens: None,
                ground_truth: GroundTruth::Mask { mask: SegMask::new(1, 1, vec![1]).unwrap() },
            }],
        };
        let path = write_manifest(dir.path(), &manifest);
        let ds = Dataset::load(&path).unwrap();
        assert!(matches!(ds.load_sample(0), Err(HarnessError::Io { .. })));
    }

    #[test]
    fn preload_caches_by_index() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImageTensor::new(20, 30, 3, vec![1.0; 20 * 30 * 3]).unwrap();
        fs::write(dir.path().join("a.bin"), img.to_blob()).unwrap();
        fs::write(dir.path().join("b.bin"), img.to_blob()).unwrap();
        let manifest = DatasetManifest {
            benchmark_id: BenchmarkId::ObjectDetection,
            normalization: None,
            samples: vec![
                SampleEntry {
                    input_uri: Some("a.bin".into()),
                    tokens: None,
                    ground_truth: GroundTruth::Boxes { boxes: vec![] },
                },
                SampleEntry {
                    input_uri: Some("b.bin".into()),
                    tokens: None,
                    ground_truth: GroundTruth::Boxes { boxes: vec![] },
                },
            ],
        };
        let path = write_manifest(dir.path(), &manifest);
        let ds = Dataset::load(&path).unwrap();
        let cache = ds.preload(&[0, 1, 0, 1, 0]).unwrap();
        assert_eq!(cache.len(), 2);
        match &cache[&0].data {
            SampleData::Image(t) => assert_eq!((t.height, t.width), (300, 300)),
            _ => panic!("expected image"),
        }
    }
}

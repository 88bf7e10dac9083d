//! Model metadata: what a backend loads and the input shape it expects.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::BenchmarkId;
use crate::preprocess::{CLASSIFICATION_SIDE, DETECTION_SIDE, MAX_TOKENS, SEGMENTATION_SIDE};

/// Numeric precision of the deployed model. Metadata only; it does not
/// change harness behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Fp32,
    Fp16,
    Int8,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("input shape {got:?} does not match canonical shape {expected:?} for {benchmark}")]
    ShapeMismatch {
        benchmark: BenchmarkId,
        expected: Vec<u32>,
        got: Vec<u32>,
    },
}

/// What the canonical preprocessing hands the model for each task:
/// HWC image dims, or a single token-sequence length.
pub fn canonical_input_shape(benchmark: BenchmarkId) -> &'static [u32] {
    match benchmark {
        BenchmarkId::ImageClassification => &[CLASSIFICATION_SIDE, CLASSIFICATION_SIDE, 3],
        BenchmarkId::ObjectDetection => &[DETECTION_SIDE, DETECTION_SIDE, 3],
        BenchmarkId::Segmentation => &[SEGMENTATION_SIDE, SEGMENTATION_SIDE, 3],
        BenchmarkId::QuestionAnswering => &[MAX_TOKENS as u32],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub benchmark_id: BenchmarkId,
    pub precision: Precision,
    pub input_shape: Vec<u32>,
    /// Opaque locator; synthetic backends ignore it.
    pub model_uri: String,
}

impl ModelDescriptor {
    /// Descriptor with the benchmark's canonical input shape filled in.
    pub fn canonical(benchmark_id: BenchmarkId, precision: Precision, model_uri: impl Into<String>) -> Self {
        ModelDescriptor {
            benchmark_id,
            precision,
            input_shape: canonical_input_shape(benchmark_id).to_vec(),
            model_uri: model_uri.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let expected = canonical_input_shape(self.benchmark_id);
        if self.input_shape != expected {
            return Err(ModelError::ShapeMismatch {
                benchmark: self.benchmark_id,
                expected: expected.to_vec(),
                got: self.input_shape.clone(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn canonical_shapes() {
        assert_eq!(canonical_input_shape(BenchmarkId::ImageClassification), &[224, 224, 3]);
        assert_eq!(canonical_input_shape(BenchmarkId::ObjectDetection), &[300, 300, 3]);
        assert_eq!(canonical_input_shape(BenchmarkId::Segmentation), &[512, 512, 3]);
        assert_eq!(canonical_input_shape(BenchmarkId::QuestionAnswering), &[384]);
    }

    #[test]
    fn canonical_descriptor_validates() {
        for b in BenchmarkId::all() {
            let d = ModelDescriptor::canonical(*b, Precision::Int8, "model.bin".to_string());
            assert!(d.validate().is_ok());
        }
    }

    #[test]
    fn mismatched_shape_is_rejected() {
        let mut d = ModelDescriptor::canonical(
            BenchmarkId::ImageClassification,
            Precision::Fp32,
            "model.bin".to_string(),
        );
        d.input_shape = vec![300, 300, 3];
        assert!(matches!(d.validate(), Err(ModelError::ShapeMismatch { .. })));
    }

    #[test]
    fn precision_serde_names() {
        assert_eq!(serde_json::to_string(&Precision::Fp32).unwrap(), "\"fp32\"");
        assert_eq!(serde_json::to_string(&Precision::Int8).unwrap(), "\"int8\"");
    }
}

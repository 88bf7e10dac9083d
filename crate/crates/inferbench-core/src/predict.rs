//! Prediction and ground-truth payloads exchanged between backends,
//! datasets, and the accuracy metrics.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::BenchmarkId;

#[derive(Debug, Error, PartialEq)]
pub enum PayloadError {
    #[error("box has xmax < xmin or ymax < ymin")]
    InvertedBox,
    #[error("box score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("mask label {0} outside [1, 32]")]
    LabelOutOfRange(u8),
    #[error("mask data length {got} does not match {h}x{w}")]
    MaskShapeMismatch { h: u32, w: u32, got: usize },
}

/// Axis-aligned box. `score` is present on predictions and absent on
/// ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
    pub class_id: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score: Option<f64>,
}

impl DetectionBox {
    pub fn validate(&self) -> Result<(), PayloadError> {
        if self.xmax < self.xmin || self.ymax < self.ymin {
            return Err(PayloadError::InvertedBox);
        }
        if let Some(s) = self.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(PayloadError::ScoreOutOfRange(s));
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }
}

/// Dense segmentation mask; labels are class indices in [1, 32],
/// where 32 is the catch-all "everything else" class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegMask {
    pub height: u32,
    pub width: u32,
    pub labels: Vec<u8>,
}

impl SegMask {
    pub const NUM_CLASSES: u8 = 32;
    /// Classes 1..=31 are evaluated; class 32 is excluded from scoring.
    pub const EXCLUDED_CLASS: u8 = 32;

    pub fn new(height: u32, width: u32, labels: Vec<u8>) -> Result<Self, PayloadError> {
        let expected = height as usize * width as usize;
        if labels.len() != expected {
            return Err(PayloadError::MaskShapeMismatch { h: height, w: width, got: labels.len() });
        }
        if let Some(bad) = labels.iter().find(|l| **l < 1 || **l > Self::NUM_CLASSES) {
            return Err(PayloadError::LabelOutOfRange(*bad));
        }
        Ok(SegMask { height, width, labels })
    }
}

/// Model output for one sample. The variant determines the benchmark,
/// so payload/task mismatches are unrepresentable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    ClassScores { scores: Vec<f64> },
    Detections { boxes: Vec<DetectionBox> },
    Mask { mask: SegMask },
    AnswerSpan { text: String },
}

impl Prediction {
    pub fn benchmark(&self) -> BenchmarkId {
        match self {
            Prediction::ClassScores { .. } => BenchmarkId::ImageClassification,
            Prediction::Detections { .. } => BenchmarkId::ObjectDetection,
            Prediction::Mask { .. } => BenchmarkId::Segmentation,
            Prediction::AnswerSpan { .. } => BenchmarkId::QuestionAnswering,
        }
    }
}

/// Reference answer for one sample, as stored in a dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroundTruth {
    Label { class_id: u32 },
    Boxes { boxes: Vec<DetectionBox> },
    Mask { mask: SegMask },
    Answers { texts: Vec<String> },
}

impl GroundTruth {
    pub fn benchmark(&self) -> BenchmarkId {
        match self {
            GroundTruth::Label { .. } => BenchmarkId::ImageClassification,
            GroundTruth::Boxes { .. } => BenchmarkId::ObjectDetection,
            GroundTruth::Mask { .. } => BenchmarkId::Segmentation,
            GroundTruth::Answers { .. } => BenchmarkId::QuestionAnswering,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn box_validation() {
        let ok = DetectionBox { xmin: 0.0, ymin: 0.0, xmax: 1.0, ymax: 2.0, class_id: 1, score: Some(0.5) };
        assert!(ok.validate().is_ok());
        assert_eq!(ok.area(), 2.0);
        let inverted = DetectionBox { xmax: -1.0, ..ok.clone() };
        assert_eq!(inverted.validate(), Err(PayloadError::InvertedBox));
        let bad_score = DetectionBox { score: Some(1.5), ..ok };
        assert_eq!(bad_score.validate(), Err(PayloadError::ScoreOutOfRange(1.5)));
    }

    #[test]
    fn mask_validation() {
        assert!(SegMask::new(2, 2, vec![1, 31, 32, 5]).is_ok());
        assert_eq!(
            SegMask::new(2, 2, vec![1, 2, 3]),
            Err(PayloadError::MaskShapeMismatch { h: 2, w: 2, got: 3 })
        );
        assert_eq!(SegMask::new(1, 1, vec![0]), Err(PayloadError::LabelOutOfRange(0)));
        assert_eq!(SegMask::new(1, 1, vec![33]), Err(PayloadError::LabelOutOfRange(33)));
    }

    #[test]
    fn payload_variant_determines_benchmark() {
        assert_eq!(
            Prediction::AnswerSpan { text: "x".to_string() }.benchmark(),
            BenchmarkId::QuestionAnswering
        );
        assert_eq!(GroundTruth::Label { class_id: 3 }.benchmark(), BenchmarkId::ImageClassification);
    }

    #[test]
    fn prediction_serde_round_trip() {
        let p = Prediction::Detections {
            boxes: vec![DetectionBox {
                xmin: 0.0,
                ymin: 0.5,
                xmax: 2.0,
                ymax: 2.5,
                class_id: 7,
                score: Some(0.25),
            }],
        };
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"kind\":\"detections\""));
        let back: Prediction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        // ground-truth boxes omit the score field entirely
        let gt = GroundTruth::Boxes {
            boxes: vec![DetectionBox { xmin: 0.0, ymin: 0.0, xmax: 1.0, ymax: 1.0, class_id: 1, score: None }],
        };
        let json = serde_json::to_string(&gt).unwrap();
        assert!(!json.contains("score"));
    }
}

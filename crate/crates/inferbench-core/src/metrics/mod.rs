//! Task accuracy metrics: Top-1, COCO-style mAP, filtered mIoU, and
//! SQuAD-style token F1. All return fractions in [0, 1]; callers that
//! gate on percent-scale thresholds multiply by 100.

pub mod classification;
pub mod detection;
pub mod qa;
pub mod segmentation;

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::benchmark::BenchmarkId;
use crate::predict::{GroundTruth, Prediction};

pub use classification::top1_accuracy;
pub use detection::{box_iou, mean_average_precision, IOU_THRESHOLDS};
pub use qa::{normalize_answer, squad_f1};
pub use segmentation::miou_filtered;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("prediction and ground-truth counts differ: {preds} vs {gts}")]
    LengthMismatch { preds: usize, gts: usize },
    #[error("no samples to evaluate")]
    EmptyInput,
    #[error("metric undefined: {0}")]
    Undefined(String),
    #[error("payload does not match benchmark {expected} at sample {index}")]
    PayloadMismatch { expected: BenchmarkId, index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Compute the benchmark's accuracy metric over aligned
/// prediction/ground-truth pairs. Returns a fraction in [0, 1].
pub fn evaluate_accuracy(
    benchmark: BenchmarkId,
    preds: &[Prediction],
    gts: &[GroundTruth],
) -> Result<f64, MetricError> {
    if preds.len() != gts.len() {
        return Err(MetricError::LengthMismatch { preds: preds.len(), gts: gts.len() });
    }
    if preds.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mismatch = |index| MetricError::PayloadMismatch { expected: benchmark, index };
    match benchmark {
        BenchmarkId::ImageClassification => {
            let mut scores = Vec::with_capacity(preds.len());
            let mut labels = Vec::with_capacity(gts.len());
            for (i, (p, g)) in preds.iter().zip(gts).enumerate() {
                match (p, g) {
                    (Prediction::ClassScores { scores: s }, GroundTruth::Label { class_id }) => {
                        scores.push(s.as_slice());
                        labels.push(*class_id);
                    }
                    _ => return Err(mismatch(i)),
                }
            }
            top1_accuracy(&scores, &labels)
        }
        BenchmarkId::ObjectDetection => {
            let mut pred_boxes = Vec::with_capacity(preds.len());
            let mut gt_boxes = Vec::with_capacity(gts.len());
            for (i, (p, g)) in preds.iter().zip(gts).enumerate() {
                match (p, g) {
                    (Prediction::Detections { boxes: pb }, GroundTruth::Boxes { boxes: gb }) => {
                        pred_boxes.push(pb.as_slice());
                        gt_boxes.push(gb.as_slice());
                    }
                    _ => return Err(mismatch(i)),
                }
            }
            mean_average_precision(&pred_boxes, &gt_boxes)
        }
        BenchmarkId::Segmentation => {
            let mut pred_masks = Vec::with_capacity(preds.len());
            let mut gt_masks = Vec::with_capacity(gts.len());
            for (i, (p, g)) in preds.iter().zip(gts).enumerate() {
                match (p, g) {
                    (Prediction::Mask { mask: pm }, GroundTruth::Mask { mask: gm }) => {
                        pred_masks.push(pm);
                        gt_masks.push(gm);
                    }
                    _ => return Err(mismatch(i)),
                }
            }
            miou_filtered(&pred_masks, &gt_masks)
        }
        BenchmarkId::QuestionAnswering => {
            let mut total = 0.0;
            for (i, (p, g)) in preds.iter().zip(gts).enumerate() {
                match (p, g) {
                    (Prediction::AnswerSpan { text }, GroundTruth::Answers { texts }) => {
                        total += squad_f1(text, texts)?;
                    }
                    _ => return Err(mismatch(i)),
                }
            }
            Ok(total / preds.len() as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn dispatch_rejects_mismatched_payloads() {
        let p = [Prediction::AnswerSpan { text: "x".to_string() }];
        let g = [GroundTruth::Label { class_id: 0 }];
        assert!(matches!(
            evaluate_accuracy(BenchmarkId::ImageClassification, &p, &g),
            Err(MetricError::PayloadMismatch { index: 0, .. })
        ));
    }

    #[test]
    fn dispatch_rejects_length_mismatch_and_empty() {
        let p = [Prediction::ClassScores { scores: vec![1.0] }];
        assert!(matches!(
            evaluate_accuracy(BenchmarkId::ImageClassification, &p, &[]),
            Err(MetricError::LengthMismatch { .. })
        ));
        assert_eq!(
            evaluate_accuracy(BenchmarkId::ImageClassification, &[], &[]),
            Err(MetricError::EmptyInput)
        );
    }

    #[test]
    fn dispatch_classification() {
        let p = [
            Prediction::ClassScores { scores: vec![0.1, 0.9] },
            Prediction::ClassScores { scores: vec![0.8, 0.2] },
        ];
        let g = [GroundTruth::Label { class_id: 1 }, GroundTruth::Label { class_id: 1 }];
        let acc = evaluate_accuracy(BenchmarkId::ImageClassification, &p, &g).unwrap();
        assert!((acc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dispatch_qa_means_over_samples() {
        let p = [
            Prediction::AnswerSpan { text: "blue whale".to_string() },
            Prediction::AnswerSpan { text: "nothing shared".to_string() },
        ];
        let g = [
            GroundTruth::Answers { texts: vec!["blue whale".to_string()] },
            GroundTruth::Answers { texts: vec!["green turtle".to_string()] },
        ];
        let f1 = evaluate_accuracy(BenchmarkId::QuestionAnswering, &p, &g).unwrap();
        assert!((f1 - 0.5).abs() < 1e-12);
    }
}

//! COCO-style mean average precision for object detection.
//!
//! For each IoU threshold in `IOU_THRESHOLDS` and each class that appears
//! in the ground truth, predictions are greedily matched in descending
//! score order (ties: image index, then box index) to the not-yet-matched
//! ground-truth box of the same class and image with the highest IoU at
//! or above the threshold (ties: lowest box index). Average precision is
//! the 101-point interpolated area under the precision-recall curve, and
//! mAP is the mean over classes, then over thresholds.

use alloc::format;
use alloc::vec::Vec;

use super::MetricError;
use crate::predict::DetectionBox;

/// IoU thresholds 0.50:0.05:0.95, written as literals so threshold
/// comparisons are bit-exact (0.5 + k*0.05 drifts in binary floating
/// point and misclassifies boundary overlaps like IoU = 0.60).
pub const IOU_THRESHOLDS: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

const RECALL_POINTS: usize = 101;

/// Intersection-over-union of two boxes; 0 when the union has zero area.
pub fn box_iou(a: &DetectionBox, b: &DetectionBox) -> f64 {
    let ix = (a.xmax.min(b.xmax) - a.xmin.max(b.xmin)).max(0.0);
    let iy = (a.ymax.min(b.ymax) - a.ymin.max(b.ymin)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

fn validate(preds: &[&[DetectionBox]], gts: &[&[DetectionBox]]) -> Result<(), MetricError> {
    for (i, image) in preds.iter().enumerate() {
        for b in *image {
            b.validate()
                .map_err(|e| MetricError::InvalidInput(format!("prediction in image {i}: {e}")))?;
            match b.score {
                Some(s) if s.is_finite() => {}
                _ => {
                    return Err(MetricError::InvalidInput(format!(
                        "prediction in image {i} has no usable score"
                    )))
                }
            }
        }
    }
    for (i, image) in gts.iter().enumerate() {
        for b in *image {
            b.validate()
                .map_err(|e| MetricError::InvalidInput(format!("ground truth in image {i}: {e}")))?;
        }
    }
    Ok(())
}

/// Average precision for one class at one IoU threshold.
fn class_ap(threshold: f64, class_id: u32, preds: &[&[DetectionBox]], gts: &[&[DetectionBox]]) -> f64 {
    let total_gt: usize = gts.iter().map(|g| g.iter().filter(|b| b.class_id == class_id).count()).sum();
    // (image, box index, score) for every prediction of this class
    let mut ranked: Vec<(usize, usize, f64)> = Vec::new();
    for (img, image) in preds.iter().enumerate() {
        for (idx, b) in image.iter().enumerate() {
            if b.class_id == class_id {
                ranked.push((img, idx, b.score.unwrap_or(0.0)));
            }
        }
    }
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    let mut matched: Vec<Vec<bool>> = gts.iter().map(|g| alloc::vec![false; g.len()]).collect();
    let mut tp_cum = 0usize;
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(ranked.len()); // (recall, precision)
    for (rank, (img, idx, _)) in ranked.iter().enumerate() {
        let pred = &preds[*img][*idx];
        let mut best: Option<(usize, f64)> = None;
        for (gi, gt) in gts[*img].iter().enumerate() {
            if gt.class_id != class_id || matched[*img][gi] {
                continue;
            }
            let iou = box_iou(pred, gt);
            if iou >= threshold {
                let better = match best {
                    Some((_, best_iou)) => iou > best_iou,
                    None => true,
                };
                if better {
                    best = Some((gi, iou));
                }
            }
        }
        if let Some((gi, _)) = best {
            matched[*img][gi] = true;
            tp_cum += 1;
        }
        curve.push((tp_cum as f64 / total_gt as f64, tp_cum as f64 / (rank + 1) as f64));
    }

    let mut ap = 0.0;
    for level in 0..RECALL_POINTS {
        let r = level as f64 / 100.0;
        let p = curve
            .iter()
            .filter(|(recall, _)| *recall >= r)
            .map(|(_, precision)| *precision)
            .fold(0.0f64, f64::max);
        ap += p;
    }
    ap / RECALL_POINTS as f64
}

/// Mean average precision over aligned per-image box lists. Classes with
/// no ground-truth boxes anywhere are skipped; predictions of such
/// classes are ignored.
pub fn mean_average_precision(
    preds: &[&[DetectionBox]],
    gts: &[&[DetectionBox]],
) -> Result<f64, MetricError> {
    if preds.len() != gts.len() {
        return Err(MetricError::LengthMismatch { preds: preds.len(), gts: gts.len() });
    }
    validate(preds, gts)?;
    let mut classes: Vec<u32> = gts.iter().flat_map(|g| g.iter().map(|b| b.class_id)).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        return Err(MetricError::Undefined(
            "no ground-truth boxes in any image".into(),
        ));
    }
    let mut over_thresholds = 0.0;
    for t in IOU_THRESHOLDS {
        let mut over_classes = 0.0;
        for c in &classes {
            over_classes += class_ap(t, *c, preds, gts);
        }
        over_thresholds += over_classes / classes.len() as f64;
    }
    Ok(over_thresholds / IOU_THRESHOLDS.len() as f64)
}

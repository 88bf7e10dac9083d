//! Mean intersection-over-union for segmentation, evaluated over
//! classes 1..=31 only. Pixels whose ground truth is the catch-all
//! class 32 are excluded from the confusion matrix entirely.

use alloc::format;

use super::MetricError;
use crate::predict::SegMask;

const CLASSES: usize = SegMask::NUM_CLASSES as usize;
const EVALUATED: usize = CLASSES - 1; // classes 1..=31

/// mIoU over the classes that appear in included ground-truth pixels.
/// Per class: IoU = TP / (TP + FP + FN) from a confusion matrix
/// accumulated over pixels with ground truth in 1..=31.
pub fn miou_filtered(preds: &[&SegMask], gts: &[&SegMask]) -> Result<f64, MetricError> {
    if preds.len() != gts.len() {
        return Err(MetricError::LengthMismatch { preds: preds.len(), gts: gts.len() });
    }
    // confusion[gt-1][pred-1], included pixels only
    let mut confusion = [[0u64; CLASSES]; CLASSES];
    for (i, (p, g)) in preds.iter().zip(gts).enumerate() {
        if p.height != g.height || p.width != g.width {
            return Err(MetricError::InvalidInput(format!(
                "mask {i}: prediction {}x{} vs ground truth {}x{}",
                p.height, p.width, g.height, g.width
            )));
        }
        for (pl, gl) in p.labels.iter().zip(&g.labels) {
            if *gl == SegMask::EXCLUDED_CLASS {
                continue;
            }
            confusion[(*gl - 1) as usize][(*pl - 1) as usize] += 1;
        }
    }

    let mut sum = 0.0;
    let mut present = 0usize;
    for c in 0..EVALUATED {
        let tp = confusion[c][c];
        let row: u64 = confusion[c].iter().sum();
        if row == 0 {
            continue; // class absent from included ground truth
        }
        let col: u64 = confusion.iter().map(|r| r[c]).sum();
        let denom = row + col - tp; // TP + FN + FP
        sum += tp as f64 / denom as f64;
        present += 1;
    }
    if present == 0 {
        return Err(MetricError::Undefined(
            "ground truth contains no pixels of evaluated classes".into(),
        ));
    }
    Ok(sum / present as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(h: u32, w: u32, labels: Vec<u8>) -> SegMask {
        SegMask::new(h, w, labels).unwrap()
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let m = mask(2, 3, vec![1, 5, 31, 2, 2, 9]);
        assert_eq!(miou_filtered(&[&m], &[&m]).unwrap(), 1.0);
    }

    #[test]
    fn all_excluded_ground_truth_is_undefined() {
        let g = mask(2, 2, vec![32, 32, 32, 32]);
        let p = mask(2, 2, vec![1, 1, 1, 1]);
        assert!(matches!(miou_filtered(&[&p], &[&g]), Err(MetricError::Undefined(_))));
    }

    #[test]
    fn worked_2x2_example() {
        // included pixels: gt 1->pred 1, gt 1->pred 2, gt 2->pred 2
        // class 1: tp 1, fn 1, fp 0 -> 1/2; class 2: tp 1, fn 0, fp 1 -> 1/2
        let g = mask(2, 2, vec![1, 1, 2, 32]);
        let p = mask(2, 2, vec![1, 2, 2, 2]);
        let v = miou_filtered(&[&p], &[&g]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn class_32_prediction_counts_against_recall_only() {
        // gt class 1, predicted as 32 on one of two pixels -> IoU 1/2
        let g = mask(1, 2, vec![1, 1]);
        let p = mask(1, 2, vec![1, 32]);
        let v = miou_filtered(&[&p], &[&g]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn accumulates_across_masks() {
        // same confusion whether pixels arrive in one mask or two
        let g1 = mask(1, 2, vec![1, 1]);
        let p1 = mask(1, 2, vec![1, 2]);
        let g2 = mask(1, 2, vec![2, 2]);
        let p2 = mask(1, 2, vec![2, 2]);
        let split = miou_filtered(&[&p1, &p2], &[&g1, &g2]).unwrap();
        let gj = mask(1, 4, vec![1, 1, 2, 2]);
        let pj = mask(1, 4, vec![1, 2, 2, 2]);
        let joined = miou_filtered(&[&pj], &[&gj]).unwrap();
        assert_eq!(split, joined);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let g = mask(1, 2, vec![1, 1]);
        let p = mask(2, 1, vec![1, 1]);
        assert!(matches!(miou_filtered(&[&p], &[&g]), Err(MetricError::InvalidInput(_))));
    }
}

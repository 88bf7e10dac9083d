//! Top-1 classification accuracy.

use alloc::string::ToString;

use super::MetricError;

/// Index of the highest score; ties go to the lowest class index.
fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        match best {
            Some((_, bs)) if *s <= bs => {}
            _ => best = Some((i, *s)),
        }
    }
    best.map(|(i, _)| i)
}

/// Fraction of samples whose argmax class equals the label.
pub fn top1_accuracy(scores: &[&[f64]], labels: &[u32]) -> Result<f64, MetricError> {
    if scores.len() != labels.len() {
        return Err(MetricError::LengthMismatch { preds: scores.len(), gts: labels.len() });
    }
    if scores.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut correct = 0u64;
    for (i, (s, label)) in scores.iter().zip(labels).enumerate() {
        let Some(top) = argmax(s) else {
            return Err(MetricError::InvalidInput(
                alloc::format!("sample {i} has an empty score vector").to_string(),
            ));
        };
        if top as u32 == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / scores.len() as f64)
}

//! Per-benchmark quality targets and the accuracy gate.
//!
//! Values and thresholds are on the percent scale (Top-1 74.66 means
//! 74.66%). Where the governing rules state a rounded threshold outright
//! (Top-1 74.66, mAP 22.7), that stated figure wins over re-deriving
//! `fraction * fp32_reference`; the other two tasks use the product.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::BenchmarkId;

#[derive(Debug, Error, PartialEq)]
pub enum QualityError {
    #[error("quality fraction must be in (0, 1]")]
    FractionOutOfRange,
    #[error("quality threshold must be positive")]
    NonPositiveThreshold,
}

/// Scale of a reported metric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueScale {
    /// 0..=100, e.g. Top-1 74.66
    Percent,
    /// 0..=1
    Fraction,
}

/// Minimum accuracy a run must reach, expressed as a fraction of an
/// FP32 reference score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityTarget {
    pub benchmark_id: BenchmarkId,
    pub fp32_reference: f64,
    pub fraction: f64,
    /// Authoritative rounded threshold, when one is published; overrides
    /// the `fraction * fp32_reference` product.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stated_threshold: Option<f64>,
}

impl QualityTarget {
    pub fn threshold(&self) -> f64 {
        self.stated_threshold.unwrap_or(self.fraction * self.fp32_reference)
    }

    pub fn validate(&self) -> Result<(), QualityError> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(QualityError::FractionOutOfRange);
        }
        let threshold = self.threshold();
        if threshold <= 0.0 || threshold.is_nan() {
            return Err(QualityError::NonPositiveThreshold);
        }
        Ok(())
    }
}

/// Outcome of gating a measured accuracy value against its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub benchmark_id: BenchmarkId,
    /// Metric name, e.g. "top1" or "map".
    pub metric: alloc::string::String,
    pub value: f64,
    pub threshold_used: f64,
    pub scale: ValueScale,
    pub passed: bool,
}

/// Inclusive gate: passes exactly when `value >= threshold`.
pub fn evaluate_quality(value: f64, target: &QualityTarget) -> MetricResult {
    let threshold = target.threshold();
    MetricResult {
        benchmark_id: target.benchmark_id,
        metric: target.benchmark_id.metric_name().into(),
        value,
        threshold_used: threshold,
        scale: ValueScale::Percent,
        passed: value >= threshold,
    }
}

/// The four deployed quality targets, percent scale.
pub fn canonical_target(benchmark: BenchmarkId) -> QualityTarget {
    match benchmark {
        BenchmarkId::ImageClassification => QualityTarget {
            benchmark_id: benchmark,
            fp32_reference: 76.19,
            fraction: 0.98,
            stated_threshold: Some(74.66),
        },
        BenchmarkId::ObjectDetection => QualityTarget {
            benchmark_id: benchmark,
            fp32_reference: 24.4,
            fraction: 0.93,
            stated_threshold: Some(22.7),
        },
        BenchmarkId::Segmentation => QualityTarget {
            benchmark_id: benchmark,
            fp32_reference: 54.8,
            fraction: 0.97,
            stated_threshold: None,
        },
        BenchmarkId::QuestionAnswering => QualityTarget {
            benchmark_id: benchmark,
            fp32_reference: 93.98,
            fraction: 0.93,
            stated_threshold: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_thresholds() {
        let t = canonical_target(BenchmarkId::ImageClassification);
        assert!((t.threshold() - 74.66).abs() < 1e-9);
        let t = canonical_target(BenchmarkId::ObjectDetection);
        assert!((t.threshold() - 22.7).abs() < 1e-9);
        let t = canonical_target(BenchmarkId::Segmentation);
        assert!((t.threshold() - 53.156).abs() < 1e-9);
        let t = canonical_target(BenchmarkId::QuestionAnswering);
        assert!((t.threshold() - 87.4014).abs() < 1e-9);
        for b in BenchmarkId::all() {
            assert!(canonical_target(*b).validate().is_ok());
        }
    }

    #[test]
    fn gate_is_inclusive() {
        let t = canonical_target(BenchmarkId::ObjectDetection);
        assert!(evaluate_quality(22.7, &t).passed);
        assert!(evaluate_quality(22.71, &t).passed);
        assert!(!evaluate_quality(22.69, &t).passed);
    }

    #[test]
    fn top1_boundary_cases() {
        let t = canonical_target(BenchmarkId::ImageClassification);
        assert!(evaluate_quality(74.7, &t).passed);
        assert!(!evaluate_quality(74.6, &t).passed);
        assert!(evaluate_quality(74.66, &t).passed);
    }

    #[test]
    fn result_records_gate_inputs() {
        let t = canonical_target(BenchmarkId::Segmentation);
        let r = evaluate_quality(55.0, &t);
        assert_eq!(r.metric, "miou");
        assert_eq!(r.scale, ValueScale::Percent);
        assert_eq!(r.threshold_used, t.threshold());
        assert_eq!(r.passed, r.value >= r.threshold_used);
    }

    #[test]
    fn validation_rejects_degenerate_targets() {
        let mut t = canonical_target(BenchmarkId::Segmentation);
        t.fraction = 0.0;
        assert_eq!(t.validate(), Err(QualityError::FractionOutOfRange));
        let mut t = canonical_target(BenchmarkId::Segmentation);
        t.fp32_reference = 0.0;
        assert_eq!(t.validate(), Err(QualityError::NonPositiveThreshold));
    }
}

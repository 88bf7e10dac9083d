//! Benchmark identities, execution scenarios, and the canonical suite order.

use core::fmt;

use serde::{Deserialize, Serialize};

/// The four tasks covered by the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkId {
    ImageClassification,
    ObjectDetection,
    Segmentation,
    QuestionAnswering,
}

impl BenchmarkId {
    pub fn all() -> &'static [BenchmarkId] {
        &[
            BenchmarkId::ImageClassification,
            BenchmarkId::ObjectDetection,
            BenchmarkId::Segmentation,
            BenchmarkId::QuestionAnswering,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkId::ImageClassification => "image_classification",
            BenchmarkId::ObjectDetection => "object_detection",
            BenchmarkId::Segmentation => "segmentation",
            BenchmarkId::QuestionAnswering => "question_answering",
        }
    }

    /// Name of the task accuracy metric, as it appears in summaries.
    pub fn metric_name(&self) -> &'static str {
        match self {
            BenchmarkId::ImageClassification => "top1",
            BenchmarkId::ObjectDetection => "map",
            BenchmarkId::Segmentation => "miou",
            BenchmarkId::QuestionAnswering => "f1",
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How queries are presented to the system under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// One query at a time; the next query is issued only after the prior
    /// completion. Reported metric: 90th-percentile latency.
    SingleStream,
    /// All samples delivered in one burst. Reported metric: average
    /// throughput in samples per second.
    Offline,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::SingleStream => "single_stream",
            Scenario::Offline => "offline",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Run mode: full-data-set accuracy verification or subset-based timing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Accuracy,
    Performance,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Accuracy => "accuracy",
            Mode::Performance => "performance",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The fixed order in which a full-rules suite executes its five tests.
pub const CANONICAL_SUITE_ORDER: [(BenchmarkId, Scenario); 5] = [
    (BenchmarkId::ImageClassification, Scenario::SingleStream),
    (BenchmarkId::ImageClassification, Scenario::Offline),
    (BenchmarkId::ObjectDetection, Scenario::SingleStream),
    (BenchmarkId::Segmentation, Scenario::SingleStream),
    (BenchmarkId::QuestionAnswering, Scenario::SingleStream),
];

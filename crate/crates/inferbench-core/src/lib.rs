//! Measurement core for a scenario-driven inference benchmark harness.
//!
//! Everything in this crate is deterministic, allocation-only computation:
//! seeded sample selection, nearest-rank latency percentiles, canonical
//! image preprocessing math, task accuracy metrics with quality-target
//! gating, and the audit rules that validate a run's structured log.
//! Wall clocks, threads, and file formats live in the companion
//! `inferbench` crate; this one is `no_std` (with `alloc`) so the same
//! arithmetic can be embedded anywhere results need to be re-checked.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod audit;
pub mod benchmark;
pub mod metrics;
pub mod model;
pub mod predict;
pub mod preprocess;
pub mod quality;
pub mod record;
pub mod rng;
pub mod run;
pub mod settings;
pub mod tensor;

pub use benchmark::{BenchmarkId, Mode, Scenario};
pub use quality::{MetricResult, QualityTarget};
pub use record::{LogRecord, RecordBody, SCHEMA_VERSION};
pub use run::{CompletionRecord, QuerySample, RunResult};
pub use settings::TestSettings;

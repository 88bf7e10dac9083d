//! Scenario-driven inference benchmarking harness: load generation,
//! synthetic backends, dataset plumbing, NDJSON run logs, and the
//! audit/reproduction tooling around them. Measurement logic itself
//! lives in `inferbench-core`; this crate adds time, threads, files,
//! and the CLI.

pub mod backend;
pub mod checker;
pub mod clock;
pub mod config;
pub mod dataset;
pub mod error;
pub mod loadgen;
pub mod logio;
pub mod report;
pub mod scaffold;
pub mod suite;
pub mod synthetic;

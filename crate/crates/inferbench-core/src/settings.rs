//! Test settings and the full-rules run constants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::{Mode, Scenario};

/// Minimum query count for a full-rules single-stream performance run.
pub const FULL_RULES_SINGLE_STREAM_QUERIES: u64 = 1024;
/// Minimum sample count for a full-rules offline performance run.
pub const FULL_RULES_OFFLINE_QUERIES: u64 = 24_576;
/// Minimum run duration for a full-rules performance run, in milliseconds.
pub const FULL_RULES_MIN_DURATION_MS: u64 = 60_000;
/// Upper bound on the cooldown pause between tests (five minutes).
pub const MAX_COOLDOWN_MS: u64 = 300_000;
/// Default per-query completion timeout.
pub const DEFAULT_QUERY_TIMEOUT_MS: u64 = 60_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SettingsError {
    #[error("min_query_count must be at least 1")]
    ZeroQueryCount,
    #[error("performance_sample_count must be at least 1")]
    ZeroSampleCount,
    #[error("cooldown_ms {0} exceeds the {MAX_COOLDOWN_MS} ms maximum")]
    CooldownTooLong(u64),
    #[error("query_timeout_ms must be at least 1")]
    ZeroTimeout,
}

/// Controls for one benchmark run.
///
/// Defaults are the full-rules constants; desk-scale configurations
/// override the counts and duration so tests finish in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSettings {
    pub scenario: Scenario,
    pub mode: Mode,
    pub seed: u64,
    pub min_query_count: u64,
    pub min_duration_ms: u64,
    /// Size of the sample subset used in performance mode. Accuracy mode
    /// always covers the whole data set, regardless of this value.
    pub performance_sample_count: u64,
    pub cooldown_ms: u64,
    pub query_timeout_ms: u64,
}

impl TestSettings {
    /// Full-rules settings for the given scenario and mode.
    pub fn full_rules(scenario: Scenario, mode: Mode, seed: u64) -> Self {
        TestSettings {
            scenario,
            mode,
            seed,
            min_query_count: match scenario {
                Scenario::SingleStream => FULL_RULES_SINGLE_STREAM_QUERIES,
                Scenario::Offline => FULL_RULES_OFFLINE_QUERIES,
            },
            min_duration_ms: FULL_RULES_MIN_DURATION_MS,
            performance_sample_count: 1,
            cooldown_ms: 0,
            query_timeout_ms: DEFAULT_QUERY_TIMEOUT_MS,
        }
    }

    pub fn validate(&self) -> Result<(), SettingsError> {
        if self.min_query_count == 0 {
            return Err(SettingsError::ZeroQueryCount);
        }
        if self.performance_sample_count == 0 {
            return Err(SettingsError::ZeroSampleCount);
        }
        if self.cooldown_ms > MAX_COOLDOWN_MS {
            return Err(SettingsError::CooldownTooLong(self.cooldown_ms));
        }
        if self.query_timeout_ms == 0 {
            return Err(SettingsError::ZeroTimeout);
        }
        Ok(())
    }

    pub fn min_duration_ns(&self) -> u64 {
        self.min_duration_ms.saturating_mul(1_000_000)
    }
}

//! Suite configuration: the versioned JSON schema the CLI consumes,
//! and its resolution into per-benchmark run settings. Paths inside a
//! config are relative to the config file itself.

use std::path::{Path, PathBuf};

use inferbench_core::benchmark::{BenchmarkId, Mode, Scenario, CANONICAL_SUITE_ORDER};
use inferbench_core::model::{ModelDescriptor, Precision};
use inferbench_core::quality::{canonical_target, QualityTarget};
use inferbench_core::settings::{
    TestSettings, DEFAULT_QUERY_TIMEOUT_MS, FULL_RULES_MIN_DURATION_MS,
    FULL_RULES_OFFLINE_QUERIES, FULL_RULES_SINGLE_STREAM_QUERIES, MAX_COOLDOWN_MS,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::synthetic::SyntheticBackendConfig;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Seed used when a benchmark entry does not pin one.
pub const DEFAULT_SEED: u64 = 42;

/// Defaults for desk-scale runs when the config leaves settings out.
pub const DEFAULT_DESK_QUERY_COUNT: u64 = 16;
pub const DEFAULT_DESK_SAMPLE_COUNT: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockKind {
    /// Wall-clock measurement with real sleeps.
    #[default]
    Monotonic,
    /// Simulated time: synthetic backends advance the clock, so even
    /// full-rules runs finish immediately.
    Virtual,
}

/// Per-benchmark overrides; anything absent falls back to the defaults
/// for the active rule set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsOverride {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_query_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_duration_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub performance_sample_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cooldown_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub query_timeout_ms: Option<u64>,
}

/// Quality-gate override; the default is each task's canonical target.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetOverride {
    pub fp32_reference: f64,
    pub fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stated_threshold: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub benchmark_id: BenchmarkId,
    pub scenario: Scenario,
    /// Dataset manifest path, relative to the config file.
    pub dataset_manifest: PathBuf,
    pub backend: SyntheticBackendConfig,
    #[serde(default = "default_precision")]
    pub precision: Precision,
    #[serde(default = "default_model_uri")]
    pub model_uri: String,
    #[serde(default)]
    pub settings: SettingsOverride,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quality_target: Option<TargetOverride>,
}

fn default_precision() -> Precision {
    Precision::Fp32
}

fn default_model_uri() -> String {
    "synthetic://echo".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub full_rules: bool,
    #[serde(default)]
    pub clock: ClockKind,
    pub benchmarks: Vec<BenchmarkEntry>,
}

/// One benchmark entry with everything resolved: absolute paths,
/// concrete settings for both modes, and the quality target.
#[derive(Debug, Clone)]
pub struct ResolvedBenchmark {
    pub benchmark_id: BenchmarkId,
    pub scenario: Scenario,
    pub manifest_path: PathBuf,
    pub descriptor: ModelDescriptor,
    pub backend: SyntheticBackendConfig,
    pub quality_target: QualityTarget,
    pub seed: u64,
    pub min_query_count: u64,
    pub min_duration_ms: u64,
    /// None means "whole dataset": concretized once the dataset size
    /// is known.
    pub performance_sample_count: Option<u64>,
    pub cooldown_ms: u64,
    pub query_timeout_ms: u64,
}

impl ResolvedBenchmark {
    /// Settings for one mode, with the subset size pinned to the
    /// loaded dataset.
    pub fn settings(&self, mode: Mode, dataset_size: usize) -> TestSettings {
        TestSettings {
            scenario: self.scenario,
            mode,
            seed: self.seed,
            min_query_count: self.min_query_count,
            min_duration_ms: self.min_duration_ms,
            performance_sample_count: self
                .performance_sample_count
                .unwrap_or(dataset_size as u64)
                .min(dataset_size as u64)
                .max(1),
            cooldown_ms: self.cooldown_ms,
            query_timeout_ms: self.query_timeout_ms,
        }
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let config: SuiteConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        if config.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "{}: schema version {} is not the supported version {CONFIG_SCHEMA_VERSION}",
                path.display(),
                config.schema_version
            )));
        }
        if config.benchmarks.is_empty() {
            return Err(HarnessError::Config(format!(
                "{}: benchmarks list is empty",
                path.display()
            )));
        }
        Ok(config)
    }

    /// Resolve each entry against the rule set. `full_rules_flag` ORs
    /// with the config's own `full_rules`; `max_cooldown_ms` caps every
    /// effective cooldown (for CI, where five-minute pauses are
    /// pointless).
    pub fn resolve(
        &self,
        config_dir: &Path,
        full_rules_flag: bool,
        max_cooldown_ms: Option<u64>,
    ) -> Result<Vec<ResolvedBenchmark>> {
        let full_rules = self.full_rules || full_rules_flag;
        if full_rules {
            let got: Vec<(BenchmarkId, Scenario)> = self
                .benchmarks
                .iter()
                .map(|b| (b.benchmark_id, b.scenario))
                .collect();
            if got != CANONICAL_SUITE_ORDER {
                return Err(HarnessError::Config(format!(
                    "full rules require the canonical five-benchmark order {:?}, config has {:?}",
                    CANONICAL_SUITE_ORDER, got
                )));
            }
        }
        self.benchmarks
            .iter()
            .enumerate()
            .map(|(i, entry)| resolve_entry(i, entry, config_dir, full_rules, max_cooldown_ms))
            .collect()
    }
}

fn resolve_entry(
    index: usize,
    entry: &BenchmarkEntry,
    config_dir: &Path,
    full_rules: bool,
    max_cooldown_ms: Option<u64>,
) -> Result<ResolvedBenchmark> {
    let field_err = |field: &str, message: String| {
        HarnessError::Config(format!("benchmarks[{index}].{field}: {message}"))
    };

    let o = &entry.settings;
    let (min_query_count, min_duration_ms) = if full_rules {
        for (field, set) in [
            ("min_query_count", o.min_query_count.is_some()),
            ("min_duration_ms", o.min_duration_ms.is_some()),
        ] {
            if set {
                return Err(field_err(
                    &format!("settings.{field}"),
                    "cannot be overridden under full rules".to_string(),
                ));
            }
        }
        let count = match entry.scenario {
            Scenario::SingleStream => FULL_RULES_SINGLE_STREAM_QUERIES,
            Scenario::Offline => FULL_RULES_OFFLINE_QUERIES,
        };
        (count, FULL_RULES_MIN_DURATION_MS)
    } else {
        (
            o.min_query_count.unwrap_or(DEFAULT_DESK_QUERY_COUNT),
            o.min_duration_ms.unwrap_or(0),
        )
    };

    let cooldown_ms = {
        let configured = o.cooldown_ms.unwrap_or(0);
        if configured > MAX_COOLDOWN_MS {
            return Err(field_err(
                "settings.cooldown_ms",
                format!("{configured} exceeds the {MAX_COOLDOWN_MS} ms maximum"),
            ));
        }
        configured.min(max_cooldown_ms.unwrap_or(u64::MAX))
    };

    let quality_target = match &entry.quality_target {
        Some(t) => {
            let target = QualityTarget {
                benchmark_id: entry.benchmark_id,
                fp32_reference: t.fp32_reference,
                fraction: t.fraction,
                stated_threshold: t.stated_threshold,
            };
            target
                .validate()
                .map_err(|e| field_err("quality_target", e.to_string()))?;
            target
        }
        None => canonical_target(entry.benchmark_id),
    };

    let descriptor =
        ModelDescriptor::canonical(entry.benchmark_id, entry.precision, entry.model_uri.clone());

    let performance_sample_count = if full_rules {
        entry.settings.performance_sample_count
    } else {
        Some(
            entry
                .settings
                .performance_sample_count
                .unwrap_or(DEFAULT_DESK_SAMPLE_COUNT),
        )
    };

    Ok(ResolvedBenchmark {
        benchmark_id: entry.benchmark_id,
        scenario: entry.scenario,
        manifest_path: config_dir.join(&entry.dataset_manifest),
        descriptor,
        backend: entry.backend.clone(),
        quality_target,
        seed: o.seed.unwrap_or(DEFAULT_SEED),
        min_query_count,
        min_duration_ms,
        performance_sample_count,
        cooldown_ms,
        query_timeout_ms: o.query_timeout_ms.unwrap_or(DEFAULT_QUERY_TIMEOUT_MS),
    })
}

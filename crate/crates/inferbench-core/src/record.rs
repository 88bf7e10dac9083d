//! Structured run-log records: one JSON object per line in a run's log.
//!
//! Every record carries `schema_version` and a monotone `ts_ns`; the
//! `record_type` tag selects the payload. Fields this version does not
//! know about survive a parse/serialize round trip via `extra`.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::benchmark::{BenchmarkId, Mode, Scenario};

/// Version written by this crate; parsers reject other versions.
pub const SCHEMA_VERSION: u32 = 1;

/// Serialize a sequence digest as a fixed-width lowercase hex string so
/// logs are diff-friendly and parsers need no 64-bit JSON integers.
mod hex_digest {
    use alloc::string::String;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, ser: S) -> Result<S::Ok, S::Error> {
        crate::rng::format_digest(*v).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<u64, D::Error> {
        let s = String::deserialize(de)?;
        if s.len() != 16 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(serde::de::Error::custom("digest must be 16 hex digits"));
        }
        u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionStatus {
    Success,
    Failure,
}

/// Payload of one log line, selected by the `record_type` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record_type", rename_all = "snake_case")]
pub enum RecordBody {
    RunHeader {
        benchmark_id: BenchmarkId,
        scenario: Scenario,
        mode: Mode,
        seed: u64,
        min_query_count: u64,
        min_duration_ms: u64,
        performance_sample_count: u64,
        dataset_size: usize,
    },
    Issue {
        query_id: u64,
        sample_index: usize,
    },
    Completion {
        query_id: u64,
        latency_ns: u64,
        status: CompletionStatus,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        failure_reason: Option<String>,
        /// Present in accuracy mode so the checker can recompute the
        /// metric from ground truth.
        #[serde(skip_serializing_if = "Option::is_none", default)]
        prediction: Option<crate::predict::Prediction>,
    },
    AccuracySummary {
        metric: String,
        value_percent: f64,
        threshold_percent: f64,
        passed: bool,
        samples_evaluated: u64,
    },
    PerformanceSummary {
        issued_count: u64,
        completed_count: u64,
        wall_time_ns: u64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        latency_p90_ns: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        throughput_sps: Option<f64>,
    },
    RunFooter {
        issued_count: u64,
        completed_count: u64,
        #[serde(with = "hex_digest")]
        sample_sequence_digest: u64,
        valid: bool,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        invalid_reason: Option<String>,
    },
}

impl RecordBody {
    pub fn kind(&self) -> &'static str {
        match self {
            RecordBody::RunHeader { .. } => "run_header",
            RecordBody::Issue { .. } => "issue",
            RecordBody::Completion { .. } => "completion",
            RecordBody::AccuracySummary { .. } => "accuracy_summary",
            RecordBody::PerformanceSummary { .. } => "performance_summary",
            RecordBody::RunFooter { .. } => "run_footer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRecord {
    pub schema_version: u32,
    pub ts_ns: u64,
    #[serde(flatten)]
    pub body: RecordBody,
    /// Fields from newer writers, preserved verbatim.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

// Hand-rolled: with two flattened fields the derived deserializer lets
// the trailing map capture the enum tag and payload keys a second time,
// which would duplicate them on re-serialization. Deserialize the whole
// object once, peel off the body, and keep only genuinely unknown keys.
impl<'de> Deserialize<'de> for LogRecord {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut map = serde_json::Map::<String, serde_json::Value>::deserialize(de)?;
        let schema_version = map
            .remove("schema_version")
            .ok_or_else(|| D::Error::missing_field("schema_version"))
            .and_then(|v| serde_json::from_value(v).map_err(D::Error::custom))?;
        let ts_ns = map
            .remove("ts_ns")
            .ok_or_else(|| D::Error::missing_field("ts_ns"))
            .and_then(|v| serde_json::from_value(v).map_err(D::Error::custom))?;
        let body: RecordBody =
            serde_json::from_value(serde_json::Value::Object(map.clone())).map_err(D::Error::custom)?;
        map.remove("record_type");
        if let Ok(serde_json::Value::Object(consumed)) = serde_json::to_value(&body) {
            for key in consumed.keys() {
                map.remove(key);
            }
        }
        Ok(LogRecord { schema_version, ts_ns, body, extra: map })
    }
}

impl LogRecord {
    pub fn new(ts_ns: u64, body: RecordBody) -> Self {
        LogRecord { schema_version: SCHEMA_VERSION, ts_ns, body, extra: serde_json::Map::new() }
    }

    pub fn is_header(&self) -> bool {
        matches!(self.body, RecordBody::RunHeader { .. })
    }

    pub fn is_footer(&self) -> bool {
        matches!(self.body, RecordBody::RunFooter { .. })
    }
}

/// Records of one run, in file order: header, events, summaries, footer.
pub type RunLog = Vec<LogRecord>;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn sample_records() -> Vec<LogRecord> {
        vec![
            LogRecord::new(
                100,
                RecordBody::RunHeader {
                    benchmark_id: BenchmarkId::ImageClassification,
                    scenario: Scenario::SingleStream,
                    mode: Mode::Performance,
                    seed: u64::MAX, // stress 64-bit JSON round trip
                    min_query_count: 1024,
                    min_duration_ms: 60_000,
                    performance_sample_count: 3,
                    dataset_size: 10,
                },
            ),
            LogRecord::new(110, RecordBody::Issue { query_id: 0, sample_index: 7 }),
            LogRecord::new(
                150,
                RecordBody::Completion {
                    query_id: 0,
                    latency_ns: 40,
                    status: CompletionStatus::Success,
                    failure_reason: None,
                    prediction: None,
                },
            ),
            LogRecord::new(
                160,
                RecordBody::RunFooter {
                    issued_count: 1,
                    completed_count: 1,
                    sample_sequence_digest: 0x4f63_5e77_2bba_d384,
                    valid: true,
                    invalid_reason: None,
                },
            ),
        ]
    }

    #[test]
    fn record_serializes_with_inline_tag() {
        let line = serde_json::to_string(&sample_records()[1]).unwrap();
        assert_eq!(
            line,
            "{\"schema_version\":1,\"ts_ns\":110,\"record_type\":\"issue\",\"query_id\":0,\"sample_index\":7}"
        );
    }

    #[test]
    fn round_trip_preserves_everything() {
        for rec in sample_records() {
            let line = serde_json::to_string(&rec).unwrap();
            let back: LogRecord = serde_json::from_str(&line).unwrap();
            assert_eq!(back, rec);
            // serializing again yields the identical line
            assert_eq!(serde_json::to_string(&back).unwrap(), line);
        }
    }

    #[test]
    fn digest_is_hex_encoded() {
        let footer = &sample_records()[3];
        let line = serde_json::to_string(footer).unwrap();
        assert!(line.contains("\"sample_sequence_digest\":\"4f635e772bbad384\""));
        let bad = line.replace("4f635e772bbad384", "xyz");
        assert!(serde_json::from_str::<LogRecord>(&bad).is_err());
    }

    #[test]
    fn unknown_fields_are_preserved() {
        let line = "{\"schema_version\":1,\"ts_ns\":5,\"record_type\":\"issue\",\"query_id\":1,\"sample_index\":2,\"vendor_note\":\"x\"}";
        let rec: LogRecord = serde_json::from_str(line).unwrap();
        assert_eq!(rec.extra.get("vendor_note").unwrap(), "x");
        let out = serde_json::to_string(&rec).unwrap();
        assert!(out.contains("\"vendor_note\":\"x\""));
        let again: LogRecord = serde_json::from_str(&out).unwrap();
        assert_eq!(again, rec);
    }

    #[test]
    fn u64_seed_survives_json() {
        let rec = &sample_records()[0];
        let line = serde_json::to_string(rec).unwrap();
        assert!(line.contains(&u64::MAX.to_string()));
        let back: LogRecord = serde_json::from_str(&line).unwrap();
        match back.body {
            RecordBody::RunHeader { seed, .. } => assert_eq!(seed, u64::MAX),
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn completion_with_prediction_round_trips() {
        let rec = LogRecord::new(
            9,
            RecordBody::Completion {
                query_id: 3,
                latency_ns: 17,
                status: CompletionStatus::Success,
                failure_reason: None,
                prediction: Some(crate::predict::Prediction::ClassScores { scores: vec![0.25, 0.75] }),
            },
        );
        let line = serde_json::to_string(&rec).unwrap();
        let back: LogRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rec);
    }
}

//! NDJSON log files: one serialized LogRecord per line. Sinks enforce
//! the run framing (header opens, footer closes, nothing in between
//! runs); the parser surfaces line numbers and rejects unknown schema
//! versions.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use inferbench_core::record::{LogRecord, RecordBody, SCHEMA_VERSION};

use crate::error::{HarnessError, Result};

/// Append-only destination for run records.
pub trait LogSink: Send {
    fn append(&mut self, record: &LogRecord) -> Result<()>;
    /// Flush and verify no run is left open.
    fn finish(&mut self) -> Result<()>;
}

#[derive(PartialEq)]
enum SinkState {
    BetweenRuns,
    InRun,
}

/// Framing-checked NDJSON writer over any byte sink.
pub struct NdjsonSink<W: Write + Send> {
    writer: W,
    state: SinkState,
    label: PathBuf,
    lines: usize,
}

impl<W: Write + Send> NdjsonSink<W> {
    pub fn new(writer: W, label: impl Into<PathBuf>) -> Self {
        NdjsonSink {
            writer,
            state: SinkState::BetweenRuns,
            label: label.into(),
            lines: 0,
        }
    }

    fn format_error(&self, message: impl Into<String>) -> HarnessError {
        HarnessError::LogFormat {
            path: self.label.clone(),
            line: self.lines + 1,
            message: message.into(),
        }
    }
}

impl<W: Write + Send> LogSink for NdjsonSink<W> {
    fn append(&mut self, record: &LogRecord) -> Result<()> {
        let is_header = matches!(record.body, RecordBody::RunHeader { .. });
        let is_footer = matches!(record.body, RecordBody::RunFooter { .. });
        match self.state {
            SinkState::BetweenRuns if !is_header => {
                return Err(self.format_error(format!(
                    "{} record outside a run (expected run_header)",
                    record.body.kind()
                )));
            }
            SinkState::InRun if is_header => {
                return Err(self.format_error("run_header inside an open run"));
            }
            _ => {}
        }
        let line = serde_json::to_string(record)
            .map_err(|e| self.format_error(format!("serialization failed: {e}")))?;
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.write_all(b"\n"))
            .map_err(|e| self.format_error(format!("write failed: {e}")))?;
        self.lines += 1;
        if is_header {
            self.state = SinkState::InRun;
        }
        if is_footer {
            self.state = SinkState::BetweenRuns;
            self.writer
                .flush()
                .map_err(|e| self.format_error(format!("flush failed: {e}")))?;
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.state == SinkState::InRun {
            return Err(self.format_error("log ends inside an open run"));
        }
        self.writer
            .flush()
            .map_err(|e| self.format_error(format!("flush failed: {e}")))
    }
}

pub type FileLogSink = NdjsonSink<BufWriter<fs::File>>;

impl FileLogSink {
    pub fn create(path: &Path) -> Result<Self> {
        let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(NdjsonSink::new(BufWriter::new(file), path))
    }
}

/// In-memory sink for tests and dry runs.
pub type MemoryLogSink = NdjsonSink<Vec<u8>>;

impl MemoryLogSink {
    pub fn in_memory() -> Self {
        NdjsonSink::new(Vec::new(), "<memory>")
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer
    }
}

/// Parse one NDJSON log file, rejecting malformed lines and foreign
/// schema versions with the offending line number.
pub fn parse_log(path: &Path) -> Result<Vec<LogRecord>> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_log_str(&text, path)
}

pub fn parse_log_str(text: &str, label: &Path) -> Result<Vec<LogRecord>> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: LogRecord = serde_json::from_str(line).map_err(|e| HarnessError::LogFormat {
            path: label.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::LogFormat {
                path: label.to_path_buf(),
                line: i + 1,
                message: format!(
                    "schema version {} is not the supported version {}",
                    record.schema_version, SCHEMA_VERSION
                ),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Write a complete, well-framed record sequence to a fresh file.
pub fn write_log(path: &Path, records: &[LogRecord]) -> Result<()> {
    let mut sink = FileLogSink::create(path)?;
    for record in records {
        sink.append(record)?;
    }
    sink.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use inferbench_core::benchmark::{BenchmarkId, Mode, Scenario};
    use inferbench_core::record::CompletionStatus;

    fn rec(ts_ns: u64, body: RecordBody) -> LogRecord {
        LogRecord {
            schema_version: SCHEMA_VERSION,
            ts_ns,
            body,
            extra: serde_json::Map::new(),
        }
    }

    fn header() -> RecordBody {
        RecordBody::RunHeader {
            benchmark_id: BenchmarkId::ImageClassification,
            scenario: Scenario::SingleStream,
            mode: Mode::Performance,
            seed: 7,
            min_query_count: 4,
            min_duration_ms: 0,
            performance_sample_count: 2,
            dataset_size: 8,
        }
    }

    fn footer() -> RecordBody {
        RecordBody::RunFooter {
            issued_count: 1,
            completed_count: 1,
            sample_sequence_digest: 0xABCD,
            valid: true,
            invalid_reason: None,
        }
    }

    #[test]
    fn file_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ndjson");
        let records = vec![
            rec(0, header()),
            rec(1, RecordBody::Issue { query_id: 0, sample_index: 5 }),
            rec(900, RecordBody::Completion {
                query_id: 0,
                latency_ns: 899,
                status: CompletionStatus::Success,
                failure_reason: None,
                prediction: None,
            }),
            rec(1000, footer()),
            rec(2000, header()),
            rec(2100, footer()),
        ];
        write_log(&path, &records).unwrap();
        let parsed = parse_log(&path).unwrap();
        assert_eq!(parsed.len(), records.len());
        for (a, b) in records.iter().zip(&parsed) {
            assert_eq!(serde_json::to_string(a).unwrap(), serde_json::to_string(b).unwrap());
        }
    }

    #[test]
    fn framing_violations_are_rejected() {
        let mut sink = MemoryLogSink::in_memory();
        // record before any header
        let issue = rec(0, RecordBody::Issue { query_id: 0, sample_index: 0 });
        assert!(matches!(sink.append(&issue), Err(HarnessError::LogFormat { .. })));
        sink.append(&rec(0, header())).unwrap();
        // header inside an open run
        assert!(sink.append(&rec(1, header())).is_err());
        // unterminated run
        assert!(sink.finish().is_err());
        sink.append(&rec(2, footer())).unwrap();
        sink.finish().unwrap();
    }

    #[test]
    fn parser_reports_the_offending_line() {
        let text = format!(
            "{}\nnot json\n",
            serde_json::to_string(&rec(0, header())).unwrap()
        );
        match parse_log_str(&text, Path::new("test.ndjson")) {
            Err(HarnessError::LogFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn foreign_schema_versions_are_rejected() {
        let mut record = rec(0, header());
        record.schema_version = 99;
        let text = serde_json::to_string(&record).unwrap();
        match parse_log_str(&text, Path::new("test.ndjson")) {
            Err(HarnessError::LogFormat { message, .. }) => {
                assert!(message.contains("schema version 99"));
            }
            other => panic!("expected a format error, got {other:?}"),
        }
    }
}

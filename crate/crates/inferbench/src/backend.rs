//! The execution-side contract: a backend accepts issued queries and
//! delivers completions to a sink, possibly out of order and from
//! other threads.

use std::sync::Arc;

use inferbench_core::model::ModelDescriptor;
use inferbench_core::predict::Prediction;
use inferbench_core::record::CompletionStatus;
use inferbench_core::run::QuerySample;

use crate::dataset::PreprocessedSample;
use crate::error::Result;

/// One finished query, as reported by a backend.
#[derive(Debug, Clone)]
pub struct Completion {
    pub query_id: u64,
    pub status: CompletionStatus,
    pub failure_reason: Option<String>,
    pub prediction: Option<Prediction>,
}

impl Completion {
    pub fn success(query_id: u64, prediction: Prediction) -> Self {
        Completion {
            query_id,
            status: CompletionStatus::Success,
            failure_reason: None,
            prediction: Some(prediction),
        }
    }

    pub fn failure(query_id: u64, reason: impl Into<String>) -> Self {
        Completion {
            query_id,
            status: CompletionStatus::Failure,
            failure_reason: Some(reason.into()),
            prediction: None,
        }
    }
}

/// Receives completions. Implementations must tolerate delivery from
/// arbitrary threads; the latency clock stops at the moment of the call.
pub trait CompletionSink: Send + Sync {
    fn on_complete(&self, completion: Completion);
}

/// A loaded model endpoint. One run at a time: `begin_run` installs the
/// sink for a run, `end_run` retires it after the last completion.
///
/// `flush` is the synchronization hook: the load generator calls it
/// when it is about to block waiting for completions, and the backend
/// must then ensure every completion it can produce without new input
/// is eventually delivered. Backends that complete work on their own
/// threads may treat it as a no-op.
pub trait Backend: Send + Sync {
    fn descriptor(&self) -> &ModelDescriptor;
    fn begin_run(&self, sink: Arc<dyn CompletionSink>) -> Result<()>;
    fn issue(&self, query: QuerySample, input: &PreprocessedSample) -> Result<()>;
    fn flush(&self) -> Result<()>;
    fn end_run(&self) -> Result<()>;
}

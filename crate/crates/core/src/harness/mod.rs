//! Evaluation pipeline: run configuration, prompt assembly, answer
//! extraction, model backends, persistence and scoring.

mod client;
mod config;
mod extract;
mod mock;
mod prompt;
mod record;
mod run;

use std::path::PathBuf;

use thiserror::Error;

use crate::serialize::SerializeError;
use crate::tasks::TaskError;

pub use client::{Completion, HttpModel};
pub use config::{
    Backend, DatasetConfig, EncodingSelection, EncodingSet, ModelConfig, RunConfig, TaskGroup, TaskSelection,
};
pub use extract::{extract_answer, extract_with, ExtractRule};
pub use mock::{mock_answer, MockContext, MockKind};
pub use prompt::{build_prompt, graph_block};
pub use record::{read_records, EvalRecord, RecordKey, RecordSink};
pub use run::{
    build_jobs, build_test_set, encode_corpus, rescore_record, run_matrix, score_records, write_report, PromptJob,
    RunOutcome,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Serialize(#[from] SerializeError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, e: impl std::fmt::Display) -> Self {
        HarnessError::Io { path: path.into(), message: e.to_string() }
    }
}

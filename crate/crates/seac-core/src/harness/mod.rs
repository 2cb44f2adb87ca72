//! Configuration, seeded runs, metric/trace files and run comparison.

pub mod compare;
pub mod config;
pub mod metrics;
pub mod run;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::agent::TrainerError;
use crate::env::EnvError;
use crate::nn::CheckpointError;

pub use compare::{compare, AlgoStats, CompareSummary, RunStats};
pub use config::RunConfig;
pub use metrics::{EpisodeMetrics, EvalMeta, EvalRecord, StepTrace};
pub use run::{export_trace, run_eval, run_train, EvalSummary, RunSummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Trainer(#[from] TrainerError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("parse error: {0}")]
    Parse(String),
}

impl HarnessError {
    pub(crate) fn io(path: PathBuf, source: io::Error) -> Self {
        HarnessError::Io { path, source }
    }
}

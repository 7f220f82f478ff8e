//! The train × test matrix.
//!
//! For every training scheme the runner builds the training set from the
//! base training split, trains one model, and scores it on every requested
//! test set built from the base test split. All intermediate corpora, models
//! and predictions are written under the output directory, so any single
//! cell can be re-scored later from files alone (see [`run_cell`]).
//!
//! Output layout:
//!
//! ```text
//! <out>/data/train/<scheme>.tsv          training corpus (+ .provenance.tsv)
//! <out>/data/test/<scheme>.tsv           test corpus (+ .provenance.tsv)
//! <out>/data/valid/<scheme>.tsv          validation corpus, when configured
//! <out>/models/<scheme>.model
//! <out>/predictions/<train>__<test>.tsv
//! <out>/cells/<train>__<test>.json       one EvalReport per cell
//! <out>/matrix.{md,csv,json}             the requested report formats
//! <out>/timings.json                     wall-clock, kept out of matrix.json
//! ```

mod config;
mod report;
mod run;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{ExperimentConfig, ReportFormat, TaggerSettings, OUTPUT_ENV};
pub use report::{emit_report, markdown_table, MatrixRow};
pub use run::{run_cell, run_matrix, Cell, CellTiming, MatrixResult, MatrixRun, RunMeta, TrainingLog};

use crate::format::ParseError;

/// Problems that stop the whole run before any cell starts.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid experiment config: {0}")]
    Invalid(String),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, #[source] ParseError),
    #[error("no output directory: set output_dir in the config or ${}", OUTPUT_ENV)]
    NoOutputDir,
}

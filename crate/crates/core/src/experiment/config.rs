use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ConfigError;
use crate::chunker::ContextLimit;
use crate::eval::EvalMode;
use crate::format::Format;
use crate::rng::derive_seed;
use crate::synth::Scheme;
use crate::tagger::TrainConfig;

/// Environment variable consulted when a config names no `output_dir`.
pub const OUTPUT_ENV: &str = "LONGNER_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerSettings {
    pub epochs: u32,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Defaults to a stream derived from the experiment seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shuffle_seed: Option<u64>,
}

impl Default for TaggerSettings {
    fn default() -> Self {
        let d = TrainConfig::default();
        TaggerSettings { epochs: d.epochs, learning_rate: d.learning_rate, batch_size: d.batch_size, shuffle_seed: None }
    }
}

fn default_test_sets() -> Vec<Scheme> {
    vec![Scheme::Original, Scheme::Concat2, Scheme::Concat3, Scheme::ConcatSimilar]
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::Original, Scheme::Concat2, Scheme::Concat3, Scheme::Combined]
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json]
}

fn yes() -> bool {
    true
}

/// A train × test run, read from JSON. Unknown keys are rejected.
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_train: PathBuf,
    pub base_test: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_valid: Option<PathBuf>,
    /// Layout of the base files; detected per file when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_format: Option<Format>,
    pub seed: u64,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_test_sets")]
    pub test_sets: Vec<Scheme>,
    #[serde(default)]
    pub tagger: TaggerSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<ContextLimit>,
    #[serde(default = "yes")]
    pub constrain: bool,
    #[serde(default)]
    pub allow_remainder: bool,
    #[serde(default)]
    pub combined_includes_similar: bool,
    #[serde(default)]
    pub eval_mode: EvalMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub report_formats: Vec<ReportFormat>,
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(base_train: impl Into<PathBuf>, base_test: impl Into<PathBuf>, seed: u64) -> Self {
        ExperimentConfig {
            base_train: base_train.into(),
            base_test: base_test.into(),
            base_valid: None,
            input_format: None,
            seed,
            schemes: default_schemes(),
            test_sets: default_test_sets(),
            tagger: TaggerSettings::default(),
            window: None,
            constrain: true,
            allow_remainder: false,
            combined_includes_similar: false,
            eval_mode: EvalMode::default(),
            output_dir: None,
            report_formats: default_formats(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_owned(), e))?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.base_train);
        resolve(&mut config.base_test);
        if let Some(p) = config.base_valid.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.output_dir.as_mut() {
            resolve(p);
        }
        Ok(config)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.tagger.epochs,
            shuffle_seed: self.tagger.shuffle_seed.unwrap_or_else(|| derive_seed(self.seed, "tagger")),
            learning_rate: self.tagger.learning_rate,
            batch_size: self.tagger.batch_size,
        }
    }

    /// `output_dir`, else `$LONGNER_OUT`.
    pub fn resolved_output_dir(&self) -> Result<PathBuf, ConfigError> {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .ok_or(ConfigError::NoOutputDir)
    }

    /// Checks everything that does not need the input files.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schemes.is_empty() {
            return Err(ConfigError::Invalid("schemes must not be empty".into()));
        }
        if self.test_sets.is_empty() {
            return Err(ConfigError::Invalid("test_sets must not be empty".into()));
        }
        if self.test_sets.contains(&Scheme::Combined) {
            return Err(ConfigError::Invalid("combined is a training-only scheme".into()));
        }
        for (name, list) in [("schemes", &self.schemes), ("test_sets", &self.test_sets)] {
            if list.iter().collect::<BTreeSet<_>>().len() != list.len() {
                return Err(ConfigError::Invalid(format!("{name} contains duplicates")));
            }
        }
        if self.report_formats.is_empty() {
            return Err(ConfigError::Invalid("report_formats must not be empty".into()));
        }
        self.train_config().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(w) = self.window {
            w.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of this config with input paths
    /// replaced by digests of the file contents and `output_dir` removed, so
    /// the hash depends on what is run rather than where.
    pub fn content_hash(&self) -> Result<String, ConfigError> {
        let mut value = serde_json::to_value(self).expect("config serializes");
        let obj = value.as_object_mut().expect("config is an object");
        obj.remove("output_dir");
        for key in ["base_train", "base_test", "base_valid"] {
            if let Some(path) = obj.get(key).and_then(|v| v.as_str()).map(PathBuf::from) {
                let bytes = fs::read(&path).map_err(|e| ConfigError::Io(path.clone(), e))?;
                obj.insert(key.to_owned(), serde_json::Value::String(sha256_hex(&bytes)));
            }
        }
        Ok(sha256_hex(serde_json::to_string(&value).expect("value serializes").as_bytes()))
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

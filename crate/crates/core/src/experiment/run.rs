use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::report::emit_report;
use super::ConfigError;
use crate::chunker::{predict_limited, ContextLimit};
use crate::corpus::Corpus;
use crate::eval::{evaluate, token_accuracy, EvalMode, EvalReport};
use crate::format::{read_corpus, serialize_corpus, write_corpus, Format};
use crate::iob::{iob_issues, repair_corpus};
use crate::rng::derive_seed;
use crate::synth::{build_dataset, provenance_sidecar, BuildOptions, Scheme};
use crate::tagger::{train_with_observer, TaggerModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub train: Scheme,
    pub test: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<EvalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub scheme: Scheme,
    pub sentences: usize,
    pub tokens: usize,
    /// Orphan `I` tags rewritten to `B` before training.
    pub repaired_tags: usize,
    /// Validation micro-F1 of the averaged model after each epoch.
    pub validation_f1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config_hash: String,
    /// Seed of each dataset's synthesis stream.
    pub scheme_seeds: BTreeMap<String, u64>,
    pub shuffle_seed: u64,
    pub window: Option<ContextLimit>,
    pub eval_mode: EvalMode,
    pub averaging: String,
}

/// Everything that goes into `matrix.json`. Contains no timing data, so two
/// runs of one config serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixResult {
    pub run_meta: RunMeta,
    pub training: Vec<TrainingLog>,
    /// Ordered by training scheme, then test set, in config order.
    pub cells: Vec<Cell>,
}

impl MatrixResult {
    pub fn cell(&self, train: Scheme, test: Scheme) -> Option<&Cell> {
        self.cells.iter().find(|c| c.train == train && c.test == test)
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTiming {
    pub train: Scheme,
    pub test: Option<Scheme>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct MatrixRun {
    pub result: MatrixResult,
    pub timings: Vec<CellTiming>,
    pub output_dir: PathBuf,
}

fn read_base(path: &Path, format: Option<Format>) -> Result<Corpus, ConfigError> {
    let file = fs::File::open(path).map_err(|e| ConfigError::Io(path.to_owned(), e))?;
    read_corpus(std::io::BufReader::new(file), format).map_err(|e| ConfigError::Parse(path.to_owned(), e))
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_dataset(path: &Path, corpus: &Corpus) -> Result<(), String> {
    write_text(path, &serialize_corpus(corpus, Format::ThreeColumn, corpus.label_style()))?;
    write_text(&path.with_extension("provenance.tsv"), &provenance_sidecar(corpus))
}

fn cell_name(train: Scheme, test: Scheme) -> String {
    format!("{}__{}", train.name(), test.name())
}

struct Inputs<'a> {
    config: &'a ExperimentConfig,
    out: &'a Path,
    opts: BuildOptions,
    valid: Option<Corpus>,
    tests: Vec<(Scheme, Result<Corpus, String>)>,
}

/// Runs the full matrix. Only configuration problems are returned as
/// errors; failures inside a cell are recorded in that cell.
pub fn run_matrix(config: &ExperimentConfig) -> Result<MatrixRun, ConfigError> {
    config.validate()?;
    let out = config.resolved_output_dir()?;
    let base_train = read_base(&config.base_train, config.input_format)?;
    let base_test = read_base(&config.base_test, config.input_format)?;
    let valid = config.base_valid.as_deref().map(|p| read_base(p, config.input_format)).transpose()?;
    let config_hash = config.content_hash()?;
    fs::create_dir_all(&out).map_err(|e| ConfigError::Io(out.clone(), e))?;

    let opts = BuildOptions {
        allow_remainder: config.allow_remainder,
        combined_includes_similar: config.combined_includes_similar,
    };
    let tests = config
        .test_sets
        .iter()
        .map(|&scheme| {
            let built = build_dataset(&base_test, scheme, config.seed, opts)
                .map_err(|e| format!("building {scheme} test set: {e}"))
                .and_then(|s| {
                    let path = out.join("data/test").join(format!("{}.tsv", scheme.name()));
                    write_dataset(&path, &s.corpus)?;
                    Ok(s.corpus)
                });
            (scheme, built)
        })
        .collect();
    let inputs = Inputs { config, out: &out, opts, valid, tests };

    let per_scheme: Vec<(TrainingLog, Vec<Cell>, Vec<CellTiming>)> =
        config.schemes.par_iter().map(|&scheme| run_scheme(&inputs, &base_train, scheme)).collect();

    let mut training = Vec::new();
    let mut cells = Vec::new();
    let mut timings = Vec::new();
    for (log, c, t) in per_scheme {
        training.push(log);
        cells.extend(c);
        timings.extend(t);
    }

    let mut scheme_seeds = BTreeMap::new();
    for s in config.schemes.iter().chain(&config.test_sets) {
        if !matches!(s, Scheme::Original | Scheme::Combined) {
            scheme_seeds.insert(s.name().to_owned(), derive_seed(config.seed, s.name()));
        }
    }
    let result = MatrixResult {
        run_meta: RunMeta {
            seed: config.seed,
            config_hash,
            scheme_seeds,
            shuffle_seed: config.train_config().shuffle_seed,
            window: config.window,
            eval_mode: config.eval_mode,
            averaging: "micro".to_owned(),
        },
        training,
        cells,
    };

    for &format in &config.report_formats {
        let path = out.join(format!("matrix.{}", format.extension()));
        write_text(&path, &emit_report(&result, format)).map_err(ConfigError::Invalid)?;
    }
    let timing_json = serde_json::to_string_pretty(&timings).expect("timings serialize");
    write_text(&out.join("timings.json"), &timing_json).map_err(ConfigError::Invalid)?;

    Ok(MatrixRun { result, timings, output_dir: out })
}

fn run_scheme(inputs: &Inputs<'_>, base_train: &Corpus, scheme: Scheme) -> (TrainingLog, Vec<Cell>, Vec<CellTiming>) {
    let config = inputs.config;
    let started = Instant::now();
    let mut log = TrainingLog {
        scheme,
        sentences: 0,
        tokens: 0,
        repaired_tags: 0,
        validation_f1: Vec::new(),
        error: None,
    };
    let fail_all = |log: &mut TrainingLog, msg: String| {
        log.error = Some(msg.clone());
        let cells = inputs
            .tests
            .iter()
            .map(|(test, _)| Cell { train: scheme, test: *test, report: None, token_accuracy: None, error: Some(msg.clone()) })
            .collect();
        cells
    };

    let train_set = match build_dataset(base_train, scheme, config.seed, inputs.opts) {
        Ok(s) => s.corpus,
        Err(e) => {
            let cells = fail_all(&mut log, format!("building {scheme} training set: {e}"));
            return (log, cells, Vec::new());
        }
    };
    log.repaired_tags = iob_issues(&train_set).len();
    let train_set = repair_corpus(&train_set);
    log.sentences = train_set.len();
    log.tokens = train_set.token_count();
    if let Err(e) = write_dataset(&inputs.out.join("data/train").join(format!("{}.tsv", scheme.name())), &train_set) {
        let cells = fail_all(&mut log, e);
        return (log, cells, Vec::new());
    }

    let valid = inputs.valid.as_ref().and_then(|v| build_dataset(v, scheme, config.seed, inputs.opts).ok());
    if let Some(v) = &valid {
        let path = inputs.out.join("data/valid").join(format!("{}.tsv", scheme.name()));
        if let Err(e) = write_dataset(&path, &v.corpus) {
            let cells = fail_all(&mut log, e);
            return (log, cells, Vec::new());
        }
    }
    let mut validation_f1 = Vec::new();
    let trained = train_with_observer(&train_set, &config.train_config(), |_, model| {
        if let Some(v) = &valid {
            let f1 = predict_limited(model, &v.corpus, config.window, config.constrain)
                .ok()
                .and_then(|p| evaluate(&v.corpus, &p, config.eval_mode).ok())
                .map_or(0.0, |r| r.f1());
            validation_f1.push(f1);
        }
    });
    log.validation_f1 = validation_f1;
    let model = match trained {
        Ok(m) => m,
        Err(e) => {
            let cells = fail_all(&mut log, format!("training on {scheme}: {e}"));
            return (log, cells, Vec::new());
        }
    };
    let model_path = inputs.out.join("models").join(format!("{}.model", scheme.name()));
    if let Err(e) = write_text(&model_path, &model.save()) {
        let cells = fail_all(&mut log, e);
        return (log, cells, Vec::new());
    }
    let mut timings = vec![CellTiming { train: scheme, test: None, seconds: started.elapsed().as_secs_f64() }];

    let cells = inputs
        .tests
        .iter()
        .map(|(test, corpus)| {
            let started = Instant::now();
            let outcome = corpus.as_ref().map_err(Clone::clone).and_then(|gold| {
                score_cell(&model, gold, config, &inputs.out.join("predictions").join(format!("{}.tsv", cell_name(scheme, *test))))
            });
            let cell = match outcome {
                Ok((report, acc)) => {
                    let json = serde_json::to_string_pretty(&report).expect("report serializes");
                    match write_text(&inputs.out.join("cells").join(format!("{}.json", cell_name(scheme, *test))), &json) {
                        Ok(()) => Cell { train: scheme, test: *test, report: Some(report), token_accuracy: Some(acc), error: None },
                        Err(e) => Cell { train: scheme, test: *test, report: None, token_accuracy: None, error: Some(e) },
                    }
                }
                Err(e) => Cell { train: scheme, test: *test, report: None, token_accuracy: None, error: Some(e) },
            };
            timings.push(CellTiming { train: scheme, test: Some(*test), seconds: started.elapsed().as_secs_f64() });
            cell
        })
        .collect();
    (log, cells, timings)
}

fn score_cell(
    model: &TaggerModel,
    gold: &Corpus,
    config: &ExperimentConfig,
    prediction_path: &Path,
) -> Result<(EvalReport, f64), String> {
    let pred = predict_limited(model, gold, config.window, config.constrain).map_err(|e| e.to_string())?;
    write_text(prediction_path, &serialize_corpus(&pred, Format::ThreeColumn, gold.label_style()))?;
    let report = evaluate(gold, &pred, config.eval_mode).map_err(|e| e.to_string())?;
    let acc = token_accuracy(gold, &pred).map_err(|e| e.to_string())?;
    Ok((report, acc))
}

/// Re-scores one cell from a persisted model and test corpus, optionally
/// writing the predictions.
pub fn run_cell(
    model_path: &Path,
    test_path: &Path,
    window: Option<ContextLimit>,
    constrain: bool,
    mode: EvalMode,
    predictions_out: Option<&Path>,
) -> Result<EvalReport, String> {
    let text = fs::read_to_string(model_path).map_err(|e| format!("{}: {e}", model_path.display()))?;
    let model = TaggerModel::load(&text).map_err(|e| e.to_string())?;
    let gold = read_base(test_path, Some(Format::ThreeColumn)).map_err(|e| e.to_string())?;
    let pred = predict_limited(&model, &gold, window, constrain).map_err(|e| e.to_string())?;
    if let Some(path) = predictions_out {
        let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        write_corpus(file, &pred, Format::ThreeColumn, gold.label_style()).map_err(|e| e.to_string())?;
    }
    evaluate(&gold, &pred, mode).map_err(|e| e.to_string())
}

mod common;

use std::fs;
use std::path::Path;

use longner::eval::EvalReport;
use longner::experiment::{emit_report, run_cell, run_matrix, ConfigError, ExperimentConfig, MatrixResult, ReportFormat};
use longner::format::{serialize_corpus, Format};
use longner::synth::Scheme;
use longner::LabelStyle;

fn write_base(dir: &Path, train: usize, test: usize) -> ExperimentConfig {
    let train_path = dir.join("train.tsv");
    let test_path = dir.join("test.tsv");
    let style = LabelStyle::PaperRaw;
    fs::write(&train_path, serialize_corpus(&common::separable_corpus(1, train, 4, 12), Format::ThreeColumn, style)).unwrap();
    fs::write(&test_path, serialize_corpus(&common::separable_corpus(2, test, 4, 12), Format::ThreeColumn, style)).unwrap();
    let mut config = ExperimentConfig::new(train_path, test_path, 42);
    config.tagger.epochs = 3;
    config
}

#[test]
fn minimal_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_base(dir.path(), 10, 10);
    config.schemes = vec![Scheme::Original];
    config.test_sets = vec![Scheme::Original];
    config.output_dir = Some(dir.path().join("out"));
    let run = run_matrix(&config).unwrap();
    assert_eq!(run.result.cells.len(), 1);
    for ext in ["md", "csv", "json"] {
        assert!(dir.path().join("out").join(format!("matrix.{ext}")).is_file());
    }
    assert!(dir.path().join("out/models/original.model").is_file());
    assert!(dir.path().join("out/predictions/original__original.tsv").is_file());
    assert!(dir.path().join("out/timings.json").is_file());
}

#[test]
fn full_matrix_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_base(dir.path(), 60, 30);
    config.output_dir = Some(dir.path().join("out"));
    let run = run_matrix(&config).unwrap();
    let result = &run.result;
    assert_eq!(result.cells.len(), 16);
    let pairs: Vec<(Scheme, Scheme)> = result.cells.iter().map(|c| (c.train, c.test)).collect();
    let mut expected = Vec::new();
    for t in [Scheme::Original, Scheme::Concat2, Scheme::Concat3, Scheme::Combined] {
        for s in [Scheme::Original, Scheme::Concat2, Scheme::Concat3, Scheme::ConcatSimilar] {
            expected.push((t, s));
        }
    }
    assert_eq!(pairs, expected);
    assert_eq!(result.failed_cells(), 0);

    let md = emit_report(result, ReportFormat::Markdown);
    let mut lines = md.lines();
    assert_eq!(lines.next(), Some("| Train | Test | F1-Score | Precision | Recall |"));
    assert_eq!(md.lines().count(), 18);
    assert!(md.contains("| Combined | Concat-similar |"));
    let csv = emit_report(result, ReportFormat::Csv);
    assert_eq!(csv.lines().next(), Some("Train,Test,F1-Score,Precision,Recall"));
    assert_eq!(fs::read_to_string(dir.path().join("out/matrix.md")).unwrap(), md);

    let json = fs::read_to_string(dir.path().join("out/matrix.json")).unwrap();
    let back: MatrixResult = serde_json::from_str(&json).unwrap();
    assert_eq!(&back, result);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_base(dir.path(), 40, 20);
    config.output_dir = Some(dir.path().join("a"));
    let a = run_matrix(&config).unwrap();
    config.output_dir = Some(dir.path().join("b"));
    let b = run_matrix(&config).unwrap();
    assert_eq!(a.result, b.result);
    for file in ["matrix.json", "matrix.md", "matrix.csv", "models/combined.model", "data/test/concat_similar.tsv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(file)).unwrap(),
            fs::read(dir.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn a_cell_can_be_rerun_from_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_base(dir.path(), 40, 20);
    config.schemes = vec![Scheme::Concat2];
    config.output_dir = Some(dir.path().join("out"));
    let run = run_matrix(&config).unwrap();
    let out = dir.path().join("out");
    let saved: EvalReport =
        serde_json::from_str(&fs::read_to_string(out.join("cells/concat2__concat3.json")).unwrap()).unwrap();
    let moved = dir.path().join("isolated");
    fs::create_dir(&moved).unwrap();
    fs::copy(out.join("models/concat2.model"), moved.join("m")).unwrap();
    fs::copy(out.join("data/test/concat3.tsv"), moved.join("t")).unwrap();
    fs::remove_dir_all(&out).unwrap();
    let pred_path = moved.join("p");
    let again = run_cell(&moved.join("m"), &moved.join("t"), None, true, config.eval_mode, Some(&pred_path)).unwrap();
    assert_eq!(again, saved);
    assert_eq!(run.result.cell(Scheme::Concat2, Scheme::Concat3).unwrap().report.as_ref(), Some(&again));
    assert!(pred_path.is_file());
}

#[test]
fn one_bad_cell_does_not_stop_the_rest() {
    let dir = tempfile::tempdir().unwrap();
    // Two test sentences: concat3 and concat-similar cannot be built.
    let mut config = write_base(dir.path(), 20, 2);
    config.output_dir = Some(dir.path().join("out"));
    config.schemes = vec![Scheme::Original];
    let run = run_matrix(&config).unwrap();
    let cell = |s| run.result.cell(Scheme::Original, s).unwrap();
    assert!(cell(Scheme::Original).report.is_some());
    assert!(cell(Scheme::Concat2).report.is_some());
    assert!(cell(Scheme::Concat3).error.as_deref().unwrap().contains("concat3"));
    assert!(cell(Scheme::ConcatSimilar).error.is_some());
    assert_eq!(run.result.failed_cells(), 2);
    let md = fs::read_to_string(dir.path().join("out/matrix.md")).unwrap();
    assert!(md.contains("| Original | Concat 3 | FAILED | FAILED | FAILED |"));
}

#[test]
fn config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_base(dir.path(), 10, 10);
    config.output_dir = None;
    if std::env::var_os(longner::experiment::OUTPUT_ENV).is_none() {
        assert!(matches!(run_matrix(&config), Err(ConfigError::NoOutputDir)));
    }
    config.output_dir = Some(dir.path().join("out"));
    config.base_test = dir.path().join("missing.tsv");
    assert!(matches!(run_matrix(&config), Err(ConfigError::Io(..))));
    fs::write(dir.path().join("bad.tsv"), "a\tBXX-\t0\n").unwrap();
    config.base_test = dir.path().join("bad.tsv");
    assert!(matches!(run_matrix(&config), Err(ConfigError::Parse(..))));
}

#[test]
fn hash_ignores_output_location() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = write_base(dir.path(), 10, 10);
    config.output_dir = Some("x".into());
    let a = config.content_hash().unwrap();
    config.output_dir = Some("y".into());
    assert_eq!(config.content_hash().unwrap(), a);
    config.seed += 1;
    assert_ne!(config.content_hash().unwrap(), a);
}

#[test]
fn example_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src/experiment.example.json");
    let config = ExperimentConfig::load(&path).unwrap();
    config.validate().unwrap();
}

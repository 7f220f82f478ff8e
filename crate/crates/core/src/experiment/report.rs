use std::fmt::Write;

use super::config::ReportFormat;
use super::run::MatrixResult;
use crate::eval::pct;
use crate::synth::Scheme;

/// One line of a result table. Scores are fractions; `None` marks a failed
/// cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub train: Scheme,
    pub test: Scheme,
    pub scores: Option<(f64, f64, f64)>,
}

impl MatrixRow {
    fn cells(&self) -> [String; 5] {
        let (f, p, r) = match self.scores {
            Some((f, p, r)) => (pct(f), pct(p), pct(r)),
            None => ("FAILED".into(), "FAILED".into(), "FAILED".into()),
        };
        [self.train.display_name().into(), self.test.display_name().into(), f, p, r]
    }
}

const HEADER: [&str; 5] = ["Train", "Test", "F1-Score", "Precision", "Recall"];

fn rows(result: &MatrixResult) -> Vec<MatrixRow> {
    result
        .cells
        .iter()
        .map(|c| MatrixRow {
            train: c.train,
            test: c.test,
            scores: c.report.as_ref().map(|r| (r.f1(), r.precision(), r.recall())),
        })
        .collect()
}

/// ```
/// use longner::experiment::{markdown_table, MatrixRow};
/// use longner::synth::Scheme;
///
/// let row = MatrixRow { train: Scheme::Original, test: Scheme::Concat2, scores: Some((0.5, 0.25, 1.0)) };
/// assert_eq!(
///     markdown_table(&[row]),
///     "| Train | Test | F1-Score | Precision | Recall |\n\
///      |---|---|---|---|---|\n\
///      | Original | Concat 2 | 50.00 | 25.00 | 100.00 |\n"
/// );
/// ```
pub fn markdown_table(rows: &[MatrixRow]) -> String {
    let mut out = format!("| {} |\n|---|---|---|---|---|\n", HEADER.join(" | "));
    for row in rows {
        writeln!(out, "| {} |", row.cells().join(" | ")).unwrap();
    }
    out
}

fn csv(rows: &[MatrixRow]) -> String {
    let mut out = format!("{}\n", HEADER.join(","));
    for row in rows {
        writeln!(out, "{}", row.cells().join(",")).unwrap();
    }
    out
}

/// Renders the matrix. Markdown and CSV show ×100 scores with two decimals;
/// JSON carries the full result at full precision.
pub fn emit_report(result: &MatrixResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => markdown_table(&rows(result)),
        ReportFormat::Csv => csv(&rows(result)),
        ReportFormat::Json => serde_json::to_string_pretty(result).expect("result serializes") + "\n",
    }
}

//! Label distribution and sentence-length statistics.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Sentence};

pub const DEFAULT_BUCKET_WIDTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl LengthSummary {
    fn of(lengths: impl Iterator<Item = usize> + Clone) -> LengthSummary {
        let n = lengths.clone().count();
        if n == 0 {
            return LengthSummary { min: 0, max: 0, mean: 0.0 };
        }
        let total: usize = lengths.clone().sum();
        LengthSummary {
            min: lengths.clone().min().unwrap_or(0),
            max: lengths.max().unwrap_or(0),
            mean: total as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    /// Occurrences of each label, spelled in the corpus's label style.
    pub per_label_counts: BTreeMap<String, usize>,
    pub sentence_count: usize,
    pub token_count: usize,
    /// Sentence length in tokens.
    pub length: LengthSummary,
    /// Sentence length in characters (tokens joined by single spaces).
    pub char_length: LengthSummary,
    pub bucket_width: usize,
    /// Bucket lower bound (in tokens) → sentences in `[bound, bound + width)`.
    pub length_histogram: BTreeMap<usize, usize>,
}

pub fn corpus_stats(corpus: &Corpus) -> StatsReport {
    corpus_stats_with_buckets(corpus, DEFAULT_BUCKET_WIDTH)
}

pub fn corpus_stats_with_buckets(corpus: &Corpus, bucket_width: usize) -> StatsReport {
    let bucket_width = bucket_width.max(1);
    let style = corpus.label_style();
    let mut per_label_counts = BTreeMap::new();
    let mut length_histogram = BTreeMap::new();
    for s in corpus.sentences() {
        for t in s.tags() {
            *per_label_counts.entry(t.render(style)).or_insert(0) += 1;
        }
        *length_histogram.entry(s.len() / bucket_width * bucket_width).or_insert(0) += 1;
    }
    let sentences = corpus.sentences().iter();
    StatsReport {
        per_label_counts,
        sentence_count: corpus.len(),
        token_count: corpus.token_count(),
        length: LengthSummary::of(sentences.clone().map(Sentence::len)),
        char_length: LengthSummary::of(sentences.map(Sentence::char_len)),
        bucket_width,
        length_histogram,
    }
}

impl StatsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "sentences  {}", self.sentence_count)?;
        writeln!(out, "tokens     {}", self.token_count)?;
        writeln!(
            out,
            "length     min {}  max {}  mean {:.2}  (tokens)",
            self.length.min, self.length.max, self.length.mean
        )?;
        writeln!(
            out,
            "           min {}  max {}  mean {:.2}  (characters)",
            self.char_length.min, self.char_length.max, self.char_length.mean
        )?;
        writeln!(out)?;
        let width = self.per_label_counts.keys().map(|k| k.chars().count()).max().unwrap_or(5).max(5);
        writeln!(out, "{:<width$}  {:>10}", "label", "count")?;
        let mut rows: Vec<_> = self.per_label_counts.iter().collect();
        // Most frequent first, as in the usual split tables.
        rows.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        for (label, count) in rows {
            writeln!(out, "{label:<width$}  {count:>10}")?;
        }
        writeln!(out)?;
        writeln!(out, "length histogram (bucket width {})", self.bucket_width)?;
        for (lo, count) in &self.length_histogram {
            writeln!(out, "{:>5}-{:<5} {count:>8}", lo, lo + self.bucket_width - 1)?;
        }
        f.write_str(&out)
    }
}

//! Reading and writing corpora.
//!
//! Two layouts are supported:
//!
//! * **three-column**: one token per row, `word<TAB>label<TAB>sentence_id`.
//!   Rows of one sentence are contiguous. A leading `Words/Labels/Sentence ID`
//!   header is skipped. Lines without a tab are split on commas, taking the
//!   last two fields as label and id, so words may contain commas.
//! * **conll**: `word<TAB>label` rows, one blank line between sentences.
//!   Sentence ids are assigned `0, 1, 2, …`.
//!
//! Input must be UTF-8. A leading byte-order mark is dropped.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{valid_token, Corpus, CorpusError, Sentence};
use crate::tag::{parse_tag, LabelStyle, Tag, TagError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    ThreeColumn,
    Conll,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "three-column" | "three_column" | "tsv" => Ok(Format::ThreeColumn),
            "conll" => Ok(Format::Conll),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: {source}")]
    MalformedLabel {
        line: usize,
        #[source]
        source: TagError,
    },
    #[error("line {line}: invalid token {token:?}")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: rows of sentence {id} are not contiguous")]
    SplitSentence { id: u64, line: usize },
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Guesses the layout from the first non-blank line.
pub fn detect_format(input: &str) -> Format {
    let first = input.trim_start_matches('\u{feff}').lines().map(str::trim_end).find(|l| !l.trim().is_empty());
    let Some(line) = first else { return Format::ThreeColumn };
    if line.contains('\t') {
        return if line.split('\t').count() >= 3 { Format::ThreeColumn } else { Format::Conll };
    }
    let comma: Vec<&str> = line.rsplitn(3, ',').collect();
    if comma.len() == 3 && (parse_id(comma[0]).is_some() || comma[0].trim().eq_ignore_ascii_case("sentence id")) {
        Format::ThreeColumn
    } else {
        Format::Conll
    }
}

pub fn read_corpus<R: Read>(mut reader: R, format: Option<Format>) -> Result<Corpus, ParseError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes).map_err(|_| ParseError::InvalidUtf8)?;
    let format = format.unwrap_or_else(|| detect_format(&text));
    parse_corpus(&text, format)
}

pub fn parse_corpus(input: &str, format: Format) -> Result<Corpus, ParseError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut labels = LabelSpelling::default();
    let sentences = match format {
        Format::ThreeColumn => parse_three_column(input, &mut labels)?,
        Format::Conll => parse_conll(input, &mut labels)?,
    };
    Ok(Corpus::new(sentences)?.with_label_style(labels.style()))
}

#[derive(Default)]
struct LabelSpelling {
    hyphenated: bool,
    compact: bool,
}

impl LabelSpelling {
    fn parse(&mut self, raw: &str, line: usize) -> Result<Tag, ParseError> {
        let tag = parse_tag(raw).map_err(|source| ParseError::MalformedLabel { line, source })?;
        if !tag.is_outside() {
            if raw.contains('-') {
                self.hyphenated = true;
            } else {
                self.compact = true;
            }
        }
        Ok(tag)
    }

    fn style(&self) -> LabelStyle {
        if self.compact && !self.hyphenated {
            LabelStyle::PaperRaw
        } else {
            LabelStyle::Hyphenated
        }
    }
}

fn parse_id(field: &str) -> Option<u64> {
    let field = field.trim();
    if let Ok(id) = field.parse::<u64>() {
        return Some(id);
    }
    // Spreadsheet exports sometimes write ids as "12.0".
    let f: f64 = field.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(53)).then_some(f as u64)
}

fn is_header(fields: &[&str]) -> bool {
    let first = fields[0].trim().to_ascii_lowercase();
    parse_id(fields[2]).is_none() && (first == "words" || first == "word")
}

fn split_row(line: &str) -> Option<Vec<&str>> {
    if line.contains('\t') {
        let fields: Vec<&str> = line.split('\t').collect();
        return (fields.len() == 3).then_some(fields);
    }
    let mut fields: Vec<&str> = line.rsplitn(3, ',').collect();
    fields.reverse();
    (fields.len() == 3).then_some(fields)
}

fn token(raw: &str, line: usize) -> Result<String, ParseError> {
    let t = raw.trim();
    if valid_token(t) {
        Ok(t.to_owned())
    } else {
        Err(ParseError::InvalidToken { line, token: raw.to_owned() })
    }
}

fn parse_three_column(input: &str, labels: &mut LabelSpelling) -> Result<Vec<Sentence>, ParseError> {
    let mut sentences = Vec::new();
    let mut finished = HashSet::new();
    let mut current: Option<(u64, Vec<String>, Vec<Tag>)> = None;
    let mut first_row = true;

    for (n, raw_line) in input.lines().enumerate() {
        let line = n + 1;
        let text = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if text.trim().is_empty() {
            continue;
        }
        let fields = split_row(text).ok_or_else(|| ParseError::MalformedRow {
            line,
            reason: "expected three columns: word, label, sentence id".into(),
        })?;
        if std::mem::take(&mut first_row) && is_header(&fields) {
            continue;
        }
        let id = parse_id(fields[2]).ok_or_else(|| ParseError::MalformedRow {
            line,
            reason: format!("sentence id {:?} is not a non-negative integer", fields[2]),
        })?;
        let word = token(fields[0], line)?;
        let tag = labels.parse(fields[1], line)?;

        match &mut current {
            Some((cur, toks, tags)) if *cur == id => {
                toks.push(word);
                tags.push(tag);
            }
            _ => {
                if finished.contains(&id) {
                    return Err(ParseError::SplitSentence { id, line });
                }
                if let Some((cur, toks, tags)) = current.take() {
                    finished.insert(cur);
                    sentences.push(Sentence::new(cur, toks, tags)?);
                }
                current = Some((id, vec![word], vec![tag]));
            }
        }
    }
    if let Some((cur, toks, tags)) = current {
        sentences.push(Sentence::new(cur, toks, tags)?);
    }
    Ok(sentences)
}

fn parse_conll(input: &str, labels: &mut LabelSpelling) -> Result<Vec<Sentence>, ParseError> {
    let mut sentences = Vec::new();
    let mut toks = Vec::new();
    let mut tags = Vec::new();
    let mut flush = |toks: &mut Vec<String>, tags: &mut Vec<Tag>| -> Result<(), ParseError> {
        if !toks.is_empty() {
            let id = sentences.len() as u64;
            sentences.push(Sentence::new(id, std::mem::take(toks), std::mem::take(tags))?);
        }
        Ok(())
    };

    for (n, raw_line) in input.lines().enumerate() {
        let line = n + 1;
        let text = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if text.trim().is_empty() {
            flush(&mut toks, &mut tags)?;
            continue;
        }
        let fields: Vec<&str> = if text.contains('\t') {
            text.split('\t').collect()
        } else {
            text.split_whitespace().collect()
        };
        if fields.len() != 2 {
            return Err(ParseError::MalformedRow {
                line,
                reason: "expected two columns: word, label".into(),
            });
        }
        toks.push(token(fields[0], line)?);
        tags.push(labels.parse(fields[1], line)?);
    }
    flush(&mut toks, &mut tags)?;
    Ok(sentences)
}

/// Renders a corpus. The output parses back to the same ids, tokens and tags.
pub fn serialize_corpus(corpus: &Corpus, format: Format, style: LabelStyle) -> String {
    let mut out = String::with_capacity(corpus.token_count() * 16);
    for (i, s) in corpus.sentences().iter().enumerate() {
        if format == Format::Conll && i > 0 {
            out.push('\n');
        }
        for (word, tag) in s.tokens().iter().zip(s.tags()) {
            let label = tag.render(style);
            match format {
                Format::ThreeColumn => writeln!(out, "{word}\t{label}\t{}", s.id()),
                Format::Conll => writeln!(out, "{word}\t{label}"),
            }
            .expect("writing to a String");
        }
    }
    out
}

pub fn write_corpus<W: Write>(
    mut writer: W,
    corpus: &Corpus,
    format: Format,
    style: LabelStyle,
) -> io::Result<()> {
    writer.write_all(serialize_corpus(corpus, format, style).as_bytes())?;
    writer.flush()
}

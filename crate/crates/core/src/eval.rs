//! Entity-level precision, recall and F1.
//!
//! Spans are read off IOB tags and a predicted span counts only if a gold
//! span in the same sentence has the same type, start and end. Scores are
//! micro-averaged over all spans; per-type and macro scores are reported
//! alongside. Token accuracy is available as a diagnostic, but on corpora
//! dominated by `O` it says little.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::tag::Tag;

/// An entity over tokens `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub entity_type: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Orphan `I-X` tags are reported as violations.
    Strict,
    /// Orphan `I-X` tags silently open a new span.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Spans {
    pub spans: Vec<EntitySpan>,
    /// Positions of orphan `I` tags (strict mode only).
    pub violations: Vec<usize>,
}

/// ```
/// use longner::eval::{extract_spans, EvalMode};
/// use longner::tag::parse_tag;
///
/// let tags: Vec<_> = ["B-NEP", "I-NEP", "O", "B-NEL"].iter().map(|t| parse_tag(t).unwrap()).collect();
/// let spans = extract_spans(&tags, EvalMode::Lenient).spans;
/// assert_eq!((spans[0].start, spans[0].end), (0, 1));
/// assert_eq!((spans[1].entity_type.as_str(), spans[1].start), ("NEL", 3));
/// ```
pub fn extract_spans(tags: &[Tag], mode: EvalMode) -> Spans {
    let mut out = Spans::default();
    let mut open: Option<(&str, usize)> = None;
    let close = |open: &mut Option<(&str, usize)>, end: usize, spans: &mut Vec<EntitySpan>| {
        if let Some((ty, start)) = open.take() {
            spans.push(EntitySpan { entity_type: ty.to_owned(), start, end });
        }
    };
    for (i, tag) in tags.iter().enumerate() {
        match tag.entity_type() {
            None => close(&mut open, i.wrapping_sub(1), &mut out.spans),
            Some(ty) if tag.is_inside() && open.is_some_and(|(t, _)| t == ty) => {}
            Some(ty) => {
                if tag.is_inside() && mode == EvalMode::Strict {
                    out.violations.push(i);
                }
                close(&mut open, i.wrapping_sub(1), &mut out.spans);
                open = Some((ty, i));
            }
        }
    }
    close(&mut open, tags.len().wrapping_sub(1), &mut out.spans);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("gold and predicted corpora are misaligned at sentence {sentence_id}: {reason}")]
    Misaligned { sentence_id: u64, reason: String },
    #[error("gold has {gold} sentences, predictions have {pred}")]
    SentenceCount { gold: usize, pred: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: usize,
    pub gold_support: usize,
    pub pred_support: usize,
}

impl Scores {
    pub fn from_counts(matched: usize, gold: usize, pred: usize) -> Scores {
        let precision = ratio(matched, pred);
        let recall = ratio(matched, gold);
        Scores { precision, recall, f1: f1(precision, recall), matched, gold_support: gold, pred_support: pred }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub micro: Scores,
    /// Unweighted mean over entity types seen in gold or predictions.
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_type: BTreeMap<String, Scores>,
    /// Orphan `I` tags found in gold plus predictions (strict mode).
    pub iob_violations: usize,
    pub mode: EvalMode,
}

impl EvalReport {
    pub fn precision(&self) -> f64 {
        self.micro.precision
    }

    pub fn recall(&self) -> f64 {
        self.micro.recall
    }

    pub fn f1(&self) -> f64 {
        self.micro.f1
    }
}

fn check_alignment(gold: &Corpus, pred: &Corpus) -> Result<(), EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount { gold: gold.len(), pred: pred.len() });
    }
    for (g, p) in gold.sentences().iter().zip(pred.sentences()) {
        let reason = if g.id() != p.id() {
            format!("prediction has sentence id {}", p.id())
        } else if g.len() != p.len() {
            format!("{} gold tokens, {} predicted", g.len(), p.len())
        } else if let Some(i) = (0..g.len()).find(|&i| g.tokens()[i] != p.tokens()[i]) {
            format!("token {i} differs: {:?} vs {:?}", g.tokens()[i], p.tokens()[i])
        } else {
            continue;
        };
        return Err(EvalError::Misaligned { sentence_id: g.id(), reason });
    }
    Ok(())
}

pub fn evaluate(gold: &Corpus, pred: &Corpus, mode: EvalMode) -> Result<EvalReport, EvalError> {
    check_alignment(gold, pred)?;
    // type -> (matched, gold, pred)
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    let mut violations = 0;
    for (g, p) in gold.sentences().iter().zip(pred.sentences()) {
        let gs = extract_spans(g.tags(), mode);
        let ps = extract_spans(p.tags(), mode);
        violations += gs.violations.len() + ps.violations.len();
        let gold_set: HashSet<&EntitySpan> = gs.spans.iter().collect();
        for s in &gs.spans {
            counts.entry(s.entity_type.clone()).or_default().1 += 1;
        }
        for s in &ps.spans {
            let c = counts.entry(s.entity_type.clone()).or_default();
            c.2 += 1;
            if gold_set.contains(s) {
                c.0 += 1;
            }
        }
    }
    let per_type: BTreeMap<String, Scores> =
        counts.iter().map(|(t, &(m, g, p))| (t.clone(), Scores::from_counts(m, g, p))).collect();
    let (m, g, p) = counts.values().fold((0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    let n = per_type.len().max(1) as f64;
    Ok(EvalReport {
        micro: Scores::from_counts(m, g, p),
        macro_precision: per_type.values().map(|s| s.precision).sum::<f64>() / n,
        macro_recall: per_type.values().map(|s| s.recall).sum::<f64>() / n,
        macro_f1: per_type.values().map(|s| s.f1).sum::<f64>() / n,
        per_type,
        iob_violations: violations,
        mode,
    })
}

/// Fraction of tokens whose predicted label equals the gold label.
/// An empty corpus scores 1.0.
pub fn token_accuracy(gold: &Corpus, pred: &Corpus) -> Result<f64, EvalError> {
    check_alignment(gold, pred)?;
    let total = gold.token_count();
    if total == 0 {
        return Ok(1.0);
    }
    let same: usize = gold
        .sentences()
        .iter()
        .zip(pred.sentences())
        .map(|(g, p)| g.tags().iter().zip(p.tags()).filter(|(a, b)| a == b).count())
        .sum();
    Ok(same as f64 / total as f64)
}

/// Recall restricted to gold spans accepted by `keep(span, sentence_len)`.
/// Returns `(matched, selected)`.
pub fn recall_where<F>(gold: &Corpus, pred: &Corpus, keep: F) -> Result<(usize, usize), EvalError>
where
    F: Fn(&EntitySpan, usize) -> bool,
{
    check_alignment(gold, pred)?;
    let mut matched = 0;
    let mut selected = 0;
    for (g, p) in gold.sentences().iter().zip(pred.sentences()) {
        let predicted: BTreeSet<EntitySpan> =
            extract_spans(p.tags(), EvalMode::Lenient).spans.into_iter().collect();
        for span in extract_spans(g.tags(), EvalMode::Lenient).spans {
            if keep(&span, g.len()) {
                selected += 1;
                matched += predicted.contains(&span) as usize;
            }
        }
    }
    Ok((matched, selected))
}

/// A score as shown in result tables: ×100, two decimals.
pub fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let width = self.per_type.keys().map(String::len).max().unwrap_or(0).max(5);
        writeln!(out, "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}  {:>7}", "type", "precision", "recall", "f1", "gold", "pred")?;
        let mut row = |name: &str, s: &Scores| {
            writeln!(
                out,
                "{name:<width$}  {:>9}  {:>9}  {:>9}  {:>7}  {:>7}",
                pct(s.precision),
                pct(s.recall),
                pct(s.f1),
                s.gold_support,
                s.pred_support
            )
        };
        for (t, s) in &self.per_type {
            row(t, s)?;
        }
        row("micro", &self.micro)?;
        writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}",
            "macro",
            pct(self.macro_precision),
            pct(self.macro_recall),
            pct(self.macro_f1)
        )?;
        if self.mode == EvalMode::Strict {
            writeln!(out, "IOB violations: {}", self.iob_violations)?;
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;
    use crate::tag::parse_tag;

    fn tags(raw: &[&str]) -> Vec<Tag> {
        raw.iter().map(|t| parse_tag(t).unwrap()).collect()
    }

    fn span(t: &str, s: usize, e: usize) -> EntitySpan {
        EntitySpan { entity_type: t.into(), start: s, end: e }
    }

    fn one(raw: &[&str]) -> Corpus {
        let toks = (0..raw.len()).map(|i| format!("t{i}")).collect();
        Corpus::new(vec![Sentence::new(0, toks, tags(raw)).unwrap()]).unwrap()
    }

    #[test]
    fn spans_basic() {
        assert!(extract_spans(&tags(&["O", "O", "O"]), EvalMode::Strict).spans.is_empty());
        assert_eq!(
            extract_spans(&tags(&["B-NEP", "I-NEP", "O", "B-NEL"]), EvalMode::Lenient).spans,
            [span("NEP", 0, 1), span("NEL", 3, 3)]
        );
        assert_eq!(
            extract_spans(&tags(&["B-NEP", "B-NEP", "I-NEP"]), EvalMode::Lenient).spans,
            [span("NEP", 0, 0), span("NEP", 1, 2)]
        );
    }

    #[test]
    fn orphans() {
        let t = tags(&["O", "I-NEP", "I-NEP"]);
        let lenient = extract_spans(&t, EvalMode::Lenient);
        assert_eq!(lenient.spans, [span("NEP", 1, 2)]);
        assert!(lenient.violations.is_empty());
        let strict = extract_spans(&t, EvalMode::Strict);
        assert_eq!(strict.spans, lenient.spans);
        assert_eq!(strict.violations, [1]);
        let t = tags(&["B-NEP", "I-NEL"]);
        assert_eq!(extract_spans(&t, EvalMode::Lenient).spans, [span("NEP", 0, 0), span("NEL", 1, 1)]);
    }

    #[test]
    fn half_precision_full_recall() {
        let gold = one(&["B-NEP", "I-NEP", "O", "O"]);
        let pred = one(&["B-NEP", "I-NEP", "O", "B-NEL"]);
        let r = evaluate(&gold, &pred, EvalMode::Lenient).unwrap();
        assert_eq!(r.precision(), 0.5);
        assert_eq!(r.recall(), 1.0);
        assert!((r.f1() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(pct(r.f1()), "66.67");
        assert_eq!(r.per_type["NEL"].pred_support, 1);
        assert_eq!(r.per_type["NEL"].gold_support, 0);
        assert_eq!(r.per_type["NEP"].f1, 1.0);
    }

    #[test]
    fn identity_and_empty() {
        let c = one(&["B-NEP", "I-NEP", "O", "B-ED"]);
        let r = evaluate(&c, &c, EvalMode::Strict).unwrap();
        assert_eq!((r.precision(), r.recall(), r.f1()), (1.0, 1.0, 1.0));
        assert!(r.per_type.values().all(|s| s.f1 == 1.0));
        let none = one(&["O"]);
        let r = evaluate(&none, &none, EvalMode::Lenient).unwrap();
        assert_eq!(r.f1(), 0.0);
        assert_eq!(r.macro_f1, 0.0);
    }

    #[test]
    fn misalignment_reported() {
        let gold = one(&["O", "O"]);
        let pred = one(&["O"]);
        assert!(matches!(evaluate(&gold, &pred, EvalMode::Lenient), Err(EvalError::Misaligned { sentence_id: 0, .. })));
        let other = Corpus::new(vec![Sentence::new(0, vec!["x".into(), "t1".into()], tags(&["O", "O"])).unwrap()]).unwrap();
        let err = token_accuracy(&gold, &other).unwrap_err();
        assert!(err.to_string().contains("token 0"), "{err}");
        assert!(matches!(
            evaluate(&gold, &Corpus::default(), EvalMode::Lenient),
            Err(EvalError::SentenceCount { gold: 1, pred: 0 })
        ));
    }

    #[test]
    fn accuracy() {
        let mut raw = vec!["O"; 9];
        raw.push("B-NEP");
        let gold = one(&raw);
        let pred = one(&["O"; 10]);
        assert!((token_accuracy(&gold, &pred).unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(token_accuracy(&gold, &gold).unwrap(), 1.0);
        assert_eq!(token_accuracy(&Corpus::default(), &Corpus::default()).unwrap(), 1.0);
    }

    #[test]
    fn restricted_recall() {
        let gold = one(&["B-NEP", "O", "O", "B-NEL"]);
        let pred = one(&["B-NEP", "O", "O", "O"]);
        let late = |s: &EntitySpan, len: usize| 4 * s.start >= 3 * len;
        assert_eq!(recall_where(&gold, &pred, late).unwrap(), (0, 1));
        assert_eq!(recall_where(&gold, &pred, |_, _| true).unwrap(), (1, 2));
    }

    #[test]
    fn report_renders() {
        let c = one(&["B-NEP"]);
        let text = evaluate(&c, &c, EvalMode::Strict).unwrap().to_string();
        assert!(text.contains("micro"));
        assert!(text.contains("100.00"));
    }
}

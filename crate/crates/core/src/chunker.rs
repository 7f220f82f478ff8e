//! Overlapping windows for taggers with a bounded context.
//!
//! A sentence longer than the window is cut into windows starting at
//! `0, S, 2S, …`; the last window is aligned to the sentence end. Each token
//! then takes its tag from the window where it sits farthest from an edge.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::iob::repair_tags;
use crate::tag::Tag;
use crate::tagger::{predict_with, viterbi_decode, TaggerError, TaggerModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChunkError {
    #[error("stride must satisfy 1 <= stride <= window (window {window}, stride {stride})")]
    InvalidStride { window: usize, stride: usize },
    #[error("window size must be at least 1")]
    InvalidWindow,
    #[error("sentence length must be at least 1")]
    EmptySequence,
    #[error("window {window} has {got} tags, expected {expected}")]
    LengthMismatch { window: usize, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub length: usize,
    pub window: usize,
    pub stride: usize,
    /// Half-open token ranges.
    pub windows: Vec<(usize, usize)>,
}

/// ```
/// use longner::chunker::plan_windows;
///
/// assert_eq!(plan_windows(5, 10, 5).unwrap().windows, [(0, 5)]);
/// assert_eq!(plan_windows(12, 8, 4).unwrap().windows, [(0, 8), (4, 12)]);
/// ```
pub fn plan_windows(length: usize, window: usize, stride: usize) -> Result<WindowPlan, ChunkError> {
    if window == 0 {
        return Err(ChunkError::InvalidWindow);
    }
    if stride == 0 || stride > window {
        return Err(ChunkError::InvalidStride { window, stride });
    }
    if length == 0 {
        return Err(ChunkError::EmptySequence);
    }
    let mut windows = Vec::new();
    let mut start = 0;
    while start + window < length {
        windows.push((start, start + window));
        start += stride;
    }
    windows.push((length.saturating_sub(window), length));
    Ok(WindowPlan { length, window, stride, windows })
}

fn edge_distance(idx: usize, (start, end): (usize, usize)) -> usize {
    (idx - start).min(end - 1 - idx)
}

/// Stitches per-window tags back into one sequence, then rewrites any
/// orphan `I-X` left at a seam to `B-X`.
pub fn merge_predictions(plan: &WindowPlan, window_tags: &[Vec<Tag>]) -> Result<Vec<Tag>, ChunkError> {
    if window_tags.len() != plan.windows.len() {
        return Err(ChunkError::LengthMismatch {
            window: window_tags.len().min(plan.windows.len()),
            expected: plan.windows.len(),
            got: window_tags.len(),
        });
    }
    for (w, (&(s, e), tags)) in plan.windows.iter().zip(window_tags).enumerate() {
        if tags.len() != e - s {
            return Err(ChunkError::LengthMismatch { window: w, expected: e - s, got: tags.len() });
        }
    }
    let merged: Vec<Tag> = (0..plan.length)
        .map(|idx| {
            let mut best: Option<(usize, usize)> = None;
            for (w, &range) in plan.windows.iter().enumerate() {
                if range.0 <= idx && idx < range.1 {
                    let d = edge_distance(idx, range);
                    if best.is_none_or(|(_, bd)| d > bd) {
                        best = Some((w, d));
                    }
                }
            }
            let (w, _) = best.expect("windows cover every token");
            window_tags[w][idx - plan.windows[w].0].clone()
        })
        .collect();
    Ok(repair_tags(&merged))
}

/// How to run a tagger whose context is limited to `size` tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContextLimit {
    /// Decode overlapping windows and merge.
    Sliding { size: usize, stride: usize },
    /// Decode the first `size` tokens; everything after is tagged `O`.
    Truncate { size: usize },
}

impl ContextLimit {
    pub fn validate(&self) -> Result<(), ChunkError> {
        match *self {
            ContextLimit::Sliding { size, stride } => plan_windows(1, size, stride).map(|_| ()),
            ContextLimit::Truncate { size: 0 } => Err(ChunkError::InvalidWindow),
            ContextLimit::Truncate { .. } => Ok(()),
        }
    }
}

#[derive(Debug, Error)]
pub enum WindowedError {
    #[error(transparent)]
    Chunk(#[from] ChunkError),
    #[error(transparent)]
    Tagger(#[from] TaggerError),
}

pub fn decode_limited(
    model: &TaggerModel,
    tokens: &[String],
    limit: Option<ContextLimit>,
    constrain: bool,
) -> Result<Vec<Tag>, WindowedError> {
    match limit {
        None => Ok(viterbi_decode(model, tokens, constrain)?),
        Some(ContextLimit::Truncate { size }) => {
            if size == 0 {
                return Err(ChunkError::InvalidWindow.into());
            }
            let keep = size.min(tokens.len());
            let mut tags = viterbi_decode(model, &tokens[..keep], constrain)?;
            tags.resize(tokens.len(), Tag::outside());
            Ok(tags)
        }
        Some(ContextLimit::Sliding { size, stride }) => {
            let plan = plan_windows(tokens.len(), size, stride)?;
            let per_window = plan
                .windows
                .iter()
                .map(|&(s, e)| viterbi_decode(model, &tokens[s..e], constrain))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(merge_predictions(&plan, &per_window)?)
        }
    }
}

/// [`crate::tagger::predict_corpus`] under a context limit.
pub fn predict_limited(
    model: &TaggerModel,
    corpus: &Corpus,
    limit: Option<ContextLimit>,
    constrain: bool,
) -> Result<Corpus, WindowedError> {
    if let Some(l) = limit {
        l.validate()?;
    }
    Ok(predict_with(corpus, |s| {
        decode_limited(model, s.tokens(), limit, constrain).map_err(|e| match e {
            WindowedError::Tagger(t) => t,
            // Validated above; decode can only fail on the model.
            WindowedError::Chunk(c) => unreachable!("{c}"),
        })
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iob::is_well_formed;
    use crate::tag::parse_tag;

    fn tags(raw: &[&str]) -> Vec<Tag> {
        raw.iter().map(|t| parse_tag(t).unwrap()).collect()
    }

    #[test]
    fn plans() {
        assert_eq!(plan_windows(5, 10, 5).unwrap().windows, [(0, 5)]);
        assert_eq!(plan_windows(12, 8, 4).unwrap().windows, [(0, 8), (4, 12)]);
        assert_eq!(plan_windows(10, 4, 3).unwrap().windows, [(0, 4), (3, 7), (6, 10)]);
        assert_eq!(plan_windows(11, 4, 3).unwrap().windows, [(0, 4), (3, 7), (6, 10), (7, 11)]);
        assert_eq!(plan_windows(8, 8, 8).unwrap().windows, [(0, 8)]);
        assert_eq!(plan_windows(3, 1, 1).unwrap().windows, [(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn plan_errors() {
        assert_eq!(plan_windows(5, 4, 5), Err(ChunkError::InvalidStride { window: 4, stride: 5 }));
        assert_eq!(plan_windows(5, 4, 0), Err(ChunkError::InvalidStride { window: 4, stride: 0 }));
        assert_eq!(plan_windows(5, 0, 0), Err(ChunkError::InvalidWindow));
        assert_eq!(plan_windows(0, 4, 2), Err(ChunkError::EmptySequence));
    }

    #[test]
    fn single_window_is_identity() {
        let plan = plan_windows(3, 8, 4).unwrap();
        let t = tags(&["B-NEP", "I-NEP", "O"]);
        assert_eq!(merge_predictions(&plan, std::slice::from_ref(&t)).unwrap(), t);
    }

    #[test]
    fn farthest_from_edge_wins() {
        // Token 5: distance 2 in (0,8), 1 in (4,12).
        let plan = plan_windows(12, 8, 4).unwrap();
        let first = vec![parse_tag("B-NEL").unwrap(); 8];
        let second = vec![Tag::outside(); 8];
        let merged = merge_predictions(&plan, &[first, second]).unwrap();
        assert_eq!(merged[5].to_string(), "B-NEL");
        // Token 6: distance 1 in (0,8), 2 in (4,12).
        assert!(merged[6].is_outside());
        assert!(merged[8].is_outside());
    }

    #[test]
    fn ties_go_to_the_earlier_window() {
        // Token 3 is on an edge of both (0,4) and (3,7).
        let plan = plan_windows(10, 4, 3).unwrap();
        let w: Vec<Vec<Tag>> = ["B-NEP", "B-NEL", "B-ED"]
            .iter()
            .map(|t| vec![parse_tag(t).unwrap(); 4])
            .collect();
        let merged = merge_predictions(&plan, &w).unwrap();
        let names: Vec<String> = merged.iter().map(Tag::to_string).collect();
        assert_eq!(names[3], "B-NEP");
        assert_eq!(names[4], "B-NEL");
        assert_eq!(names[6], "B-NEL");
        assert_eq!(names[9], "B-ED");
    }

    #[test]
    fn seams_are_repaired() {
        let plan = plan_windows(12, 8, 4).unwrap();
        let first = vec![Tag::outside(); 8];
        let second = vec![parse_tag("I-NEP").unwrap(); 8];
        let merged = merge_predictions(&plan, &[first, second]).unwrap();
        assert!(is_well_formed(&merged));
        assert!(merged[5].is_outside());
        assert_eq!(merged[6].to_string(), "B-NEP");
        assert_eq!(merged[7].to_string(), "I-NEP");
        assert_eq!(merged.len(), 12);
    }

    #[test]
    fn mismatched_lengths() {
        let plan = plan_windows(12, 8, 4).unwrap();
        assert!(matches!(
            merge_predictions(&plan, &[vec![Tag::outside(); 8]]),
            Err(ChunkError::LengthMismatch { .. })
        ));
        assert!(matches!(
            merge_predictions(&plan, &[vec![Tag::outside(); 8], vec![Tag::outside(); 7]]),
            Err(ChunkError::LengthMismatch { window: 1, expected: 8, got: 7 })
        ));
    }

    #[test]
    fn truncate_pads_with_outside() {
        let m = TaggerModel::new([parse_tag("B-NEP").unwrap()]);
        let toks: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let out = decode_limited(&m, &toks, Some(ContextLimit::Truncate { size: 2 }), true).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out[2..].iter().all(Tag::is_outside));
        assert_eq!(out[0].to_string(), "B-NEP");
    }

    #[test]
    fn limit_config_json() {
        let l: ContextLimit = serde_json::from_str(r#"{"mode":"sliding","size":32,"stride":16}"#).unwrap();
        assert_eq!(l, ContextLimit::Sliding { size: 32, stride: 16 });
        let t: ContextLimit = serde_json::from_str(r#"{"mode":"truncate","size":32}"#).unwrap();
        assert_eq!(t, ContextLimit::Truncate { size: 32 });
        assert!(ContextLimit::Sliding { size: 4, stride: 5 }.validate().is_err());
    }
}

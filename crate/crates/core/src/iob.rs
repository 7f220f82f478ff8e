//! IOB well-formedness: an `I-X` must continue a `B-X` or `I-X`.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::tag::Tag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Strict,
    Repair,
}

/// An orphan `I` tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IobIssue {
    pub sentence_id: u64,
    pub index: usize,
    pub tag: Tag,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Validation {
    Issues(Vec<IobIssue>),
    Repaired(Corpus),
}

/// Indices of orphan `I` tags in one tag sequence.
pub fn orphan_positions(tags: &[Tag]) -> Vec<usize> {
    (0..tags.len())
        .filter(|&i| !tags[i].may_follow(i.checked_sub(1).map(|p| &tags[p])))
        .collect()
}

/// Rewrites every orphan `I-X` to `B-X`. Checks against the repaired
/// predecessor, so a run of orphans becomes `B-X I-X …`.
pub fn repair_tags(tags: &[Tag]) -> Vec<Tag> {
    let mut out: Vec<Tag> = Vec::with_capacity(tags.len());
    for t in tags {
        if t.may_follow(out.last()) {
            out.push(t.clone());
        } else {
            out.push(t.to_begin());
        }
    }
    out
}

pub fn is_well_formed(tags: &[Tag]) -> bool {
    tags.iter().enumerate().all(|(i, t)| t.may_follow(i.checked_sub(1).map(|p| &tags[p])))
}

pub fn validate_iob(corpus: &Corpus, mode: ValidationMode) -> Validation {
    match mode {
        ValidationMode::Strict => Validation::Issues(iob_issues(corpus)),
        ValidationMode::Repair => Validation::Repaired(repair_corpus(corpus)),
    }
}

pub fn iob_issues(corpus: &Corpus) -> Vec<IobIssue> {
    corpus
        .sentences()
        .iter()
        .flat_map(|s| {
            orphan_positions(s.tags()).into_iter().map(move |index| IobIssue {
                sentence_id: s.id(),
                index,
                tag: s.tags()[index].clone(),
            })
        })
        .collect()
}

pub fn repair_corpus(corpus: &Corpus) -> Corpus {
    corpus.map_tags(|s| repair_tags(s.tags())).expect("repair keeps lengths")
}

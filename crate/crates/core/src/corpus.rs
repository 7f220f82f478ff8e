//! Sentences and corpora.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tag::{LabelStyle, Tag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("sentence {id} is empty")]
    EmptySentence { id: u64 },
    #[error("sentence {id} has {tokens} tokens but {tags} tags")]
    LengthMismatch { id: u64, tokens: usize, tags: usize },
    #[error("sentence {id} has an empty token or a token containing whitespace: {token:?}")]
    InvalidToken { id: u64, token: String },
    #[error("duplicate sentence id {0}")]
    DuplicateId(u64),
}

/// A tokenized sentence with one tag per token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    id: u64,
    tokens: Vec<String>,
    tags: Vec<Tag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<u64>>,
}

pub(crate) fn valid_token(token: &str) -> bool {
    !token.is_empty() && !token.chars().any(char::is_whitespace)
}

impl Sentence {
    pub fn new(id: u64, tokens: Vec<String>, tags: Vec<Tag>) -> Result<Sentence, CorpusError> {
        if tokens.len() != tags.len() {
            return Err(CorpusError::LengthMismatch { id, tokens: tokens.len(), tags: tags.len() });
        }
        if tokens.is_empty() {
            return Err(CorpusError::EmptySentence { id });
        }
        if let Some(bad) = tokens.iter().find(|t| !valid_token(t)) {
            return Err(CorpusError::InvalidToken { id, token: bad.clone() });
        }
        Ok(Sentence { id, tokens, tags, provenance: None })
    }

    pub fn with_provenance(mut self, provenance: Vec<u64>) -> Sentence {
        self.provenance = Some(provenance);
        self
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn provenance(&self) -> Option<&[u64]> {
        self.provenance.as_deref()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Length in Unicode scalars of the tokens joined by single spaces.
    pub fn char_len(&self) -> usize {
        self.tokens.iter().map(|t| t.chars().count()).sum::<usize>() + self.tokens.len() - 1
    }

    /// Same sentence with a different tag sequence of equal length.
    pub fn retagged(&self, tags: Vec<Tag>) -> Result<Sentence, CorpusError> {
        if tags.len() != self.tokens.len() {
            return Err(CorpusError::LengthMismatch {
                id: self.id,
                tokens: self.tokens.len(),
                tags: tags.len(),
            });
        }
        Ok(Sentence { tags, ..self.clone() })
    }

    pub(crate) fn renumbered(&self, id: u64) -> Sentence {
        Sentence { id, ..self.clone() }
    }

    /// Consecutive token range `[start, end)` as a new sentence with the same id.
    pub fn slice(&self, start: usize, end: usize) -> Sentence {
        Sentence {
            id: self.id,
            tokens: self.tokens[start..end].to_vec(),
            tags: self.tags[start..end].to_vec(),
            provenance: None,
        }
    }
}

/// An ordered collection of sentences with unique ids.
///
/// `label_style` records how labels were spelled in the source file and is
/// the style used for [`Corpus::tagset`] and label statistics.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    label_style: LabelStyle,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Result<Corpus, CorpusError> {
        let mut seen = HashSet::with_capacity(sentences.len());
        for s in &sentences {
            if !seen.insert(s.id) {
                return Err(CorpusError::DuplicateId(s.id));
            }
        }
        Ok(Corpus { sentences, label_style: LabelStyle::default() })
    }

    /// Builds a corpus and assigns ids `0..n` in order.
    pub fn renumbered(sentences: Vec<Sentence>) -> Corpus {
        let sentences = sentences.iter().enumerate().map(|(i, s)| s.renumbered(i as u64)).collect();
        Corpus { sentences, label_style: LabelStyle::default() }
    }

    pub fn with_label_style(mut self, style: LabelStyle) -> Corpus {
        self.label_style = style;
        self
    }

    pub fn label_style(&self) -> LabelStyle {
        self.label_style
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn into_sentences(self) -> Vec<Sentence> {
        self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// Distinct labels in this corpus, spelled in its label style.
    pub fn tagset(&self) -> BTreeSet<String> {
        self.sentences
            .iter()
            .flat_map(|s| s.tags.iter())
            .map(|t| t.render(self.label_style))
            .collect()
    }

    /// Distinct tags in canonical order.
    pub fn tags(&self) -> BTreeSet<Tag> {
        self.sentences.iter().flat_map(|s| s.tags.iter().cloned()).collect()
    }

    /// Replaces every sentence's tags, keeping ids, tokens and provenance.
    pub fn map_tags<F>(&self, mut f: F) -> Result<Corpus, CorpusError>
    where
        F: FnMut(&Sentence) -> Vec<Tag>,
    {
        let sentences = self
            .sentences
            .iter()
            .map(|s| s.retagged(f(s)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus { sentences, label_style: self.label_style })
    }
}

/// Where the sentences of one input corpus ended up after [`merge_offset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdRemap {
    pub source: usize,
    pub offset: u64,
    pub remapped: usize,
}

/// Concatenates corpora read from separate files. When a corpus reuses ids
/// already taken by an earlier one, all of its ids are shifted by a common
/// offset (one past the largest id so far).
pub fn merge_offset(corpora: Vec<Corpus>) -> (Corpus, Vec<IdRemap>) {
    let style = corpora.first().map(|c| c.label_style).unwrap_or_default();
    let mut taken = HashSet::new();
    let mut next_free = 0u64;
    let mut out = Vec::new();
    let mut remaps = Vec::new();
    for (source, corpus) in corpora.into_iter().enumerate() {
        let clash = corpus.sentences.iter().any(|s| taken.contains(&s.id));
        let offset = if clash { next_free } else { 0 };
        if clash {
            remaps.push(IdRemap { source, offset, remapped: corpus.len() });
        }
        for s in corpus.sentences {
            let id = s.id + offset;
            taken.insert(id);
            next_free = next_free.max(id + 1);
            out.push(s.renumbered(id));
        }
    }
    (Corpus { sentences: out, label_style: style }, remaps)
}

//! Long-range datasets built by concatenating sentences of one split.
//!
//! * `concat_k` shuffles the sentences, cuts the shuffled order into
//!   consecutive groups of `k` and joins each group into one sentence.
//! * `concat_similar` cuts the shuffled order into triples, repeats one
//!   member of each triple and joins the four parts in a shuffled order.
//! * `combine` stacks whole corpora.
//!
//! All randomness comes from [`SplitMix64`] with the draw order documented on
//! each function, so a seed fixes the output exactly. Sentences are used at
//! most once per output; leftovers that do not fill a group are reported in
//! [`Synthesis::unused`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Sentence};
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("need at least {need} sentences, corpus has {have}")]
    TooFewSentences { need: usize, have: usize },
    #[error("group size must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("nothing to combine")]
    EmptyList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub corpus: Corpus,
    /// Ids of input sentences left out because they did not fill a group.
    pub unused: Vec<u64>,
}

fn join(id: u64, parts: &[&Sentence]) -> Sentence {
    let tokens = parts.iter().flat_map(|s| s.tokens().iter().cloned()).collect();
    let tags = parts.iter().flat_map(|s| s.tags().iter().cloned()).collect();
    Sentence::new(id, tokens, tags)
        .expect("joined sentences keep the sentence invariants")
        .with_provenance(parts.iter().map(|s| s.id()).collect())
}

fn shuffled(corpus: &Corpus, rng: &mut SplitMix64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    rng.shuffle(&mut order);
    order
}

/// Joins groups of `k` shuffled sentences.
///
/// Draws: one Fisher–Yates shuffle of the sentence positions. New ids are
/// `0, 1, …` in group order. With `allow_remainder` a final short group is
/// emitted as-is; otherwise its sentences are listed in `unused`.
pub fn concat_k(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    allow_remainder: bool,
) -> Result<Synthesis, SynthError> {
    if k < 2 {
        return Err(SynthError::InvalidK(k));
    }
    if corpus.len() < k {
        return Err(SynthError::TooFewSentences { need: k, have: corpus.len() });
    }
    let mut rng = SplitMix64::new(seed);
    let order = shuffled(corpus, &mut rng);
    let all = corpus.sentences();

    let mut out = Vec::with_capacity(order.len() / k + 1);
    let mut unused = Vec::new();
    for group in order.chunks(k) {
        let parts: Vec<&Sentence> = group.iter().map(|&i| &all[i]).collect();
        if group.len() < k && !allow_remainder {
            unused.extend(parts.iter().map(|s| s.id()));
            continue;
        }
        out.push(join(out.len() as u64, &parts));
    }
    Ok(Synthesis { corpus: rebuild(out, corpus), unused })
}

/// Joins shuffled triples with one member repeated.
///
/// Draws, in order: one shuffle of the sentence positions; then per triple a
/// draw in `[0, 3)` picking the repeated member, followed by a shuffle of the
/// four parts `[a, b, c, repeated]`.
pub fn concat_similar(corpus: &Corpus, seed: u64) -> Result<Synthesis, SynthError> {
    if corpus.len() < 3 {
        return Err(SynthError::TooFewSentences { need: 3, have: corpus.len() });
    }
    let mut rng = SplitMix64::new(seed);
    let order = shuffled(corpus, &mut rng);
    let all = corpus.sentences();

    let mut out = Vec::with_capacity(order.len() / 3);
    let mut unused = Vec::new();
    for triple in order.chunks(3) {
        if triple.len() < 3 {
            unused.extend(triple.iter().map(|&i| all[i].id()));
            continue;
        }
        let repeated = triple[rng.below(3) as usize];
        let mut parts = [triple[0], triple[1], triple[2], repeated];
        rng.shuffle(&mut parts);
        let parts: Vec<&Sentence> = parts.iter().map(|&i| &all[i]).collect();
        out.push(join(out.len() as u64, &parts));
    }
    Ok(Synthesis { corpus: rebuild(out, corpus), unused })
}

/// Concatenates corpora in order and renumbers ids `0..n`.
pub fn combine(corpora: &[Corpus]) -> Result<Corpus, SynthError> {
    let first = corpora.first().ok_or(SynthError::EmptyList)?;
    let all: Vec<Sentence> = corpora.iter().flat_map(|c| c.sentences().iter().cloned()).collect();
    Ok(Corpus::renumbered(all).with_label_style(first.label_style()))
}

fn rebuild(sentences: Vec<Sentence>, like: &Corpus) -> Corpus {
    Corpus::new(sentences).expect("fresh ids are unique").with_label_style(like.label_style())
}

/// The named datasets of the train/test matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Original,
    Concat2,
    Concat3,
    ConcatSimilar,
    Combined,
}

impl Scheme {
    pub const ALL: [Scheme; 5] =
        [Scheme::Original, Scheme::Concat2, Scheme::Concat3, Scheme::ConcatSimilar, Scheme::Combined];

    /// Identifier used for seed derivation and file names.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Original => "original",
            Scheme::Concat2 => "concat2",
            Scheme::Concat3 => "concat3",
            Scheme::ConcatSimilar => "concat_similar",
            Scheme::Combined => "combined",
        }
    }

    /// Row label used in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Scheme::Original => "Original",
            Scheme::Concat2 => "Concat 2",
            Scheme::Concat3 => "Concat 3",
            Scheme::ConcatSimilar => "Concat-similar",
            Scheme::Combined => "Combined",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "original" => Ok(Scheme::Original),
            "concat2" | "concat_2" => Ok(Scheme::Concat2),
            "concat3" | "concat_3" => Ok(Scheme::Concat3),
            "concat_similar" | "concatsimilar" => Ok(Scheme::ConcatSimilar),
            "combined" => Ok(Scheme::Combined),
            _ => Err(format!("unknown scheme {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BuildOptions {
    pub allow_remainder: bool,
    /// Add the concat-similar set to the combined training set.
    pub combined_includes_similar: bool,
}

/// Builds a named dataset from a base split.
///
/// Each concatenation scheme draws from its own stream seeded with
/// [`derive_seed`]`(seed, scheme.name())`. The combined set reuses exactly
/// those streams, so it contains the same concat2 and concat3 sentences as
/// the standalone datasets built from the same seed.
pub fn build_dataset(
    base: &Corpus,
    scheme: Scheme,
    seed: u64,
    opts: BuildOptions,
) -> Result<Synthesis, SynthError> {
    let stream = |s: Scheme| derive_seed(seed, s.name());
    match scheme {
        Scheme::Original => Ok(Synthesis { corpus: base.clone(), unused: Vec::new() }),
        Scheme::Concat2 => concat_k(base, 2, stream(Scheme::Concat2), opts.allow_remainder),
        Scheme::Concat3 => concat_k(base, 3, stream(Scheme::Concat3), opts.allow_remainder),
        Scheme::ConcatSimilar => concat_similar(base, stream(Scheme::ConcatSimilar)),
        Scheme::Combined => {
            let mut parts = vec![base.clone()];
            for s in [Scheme::Concat2, Scheme::Concat3] {
                parts.push(build_dataset(base, s, seed, opts)?.corpus);
            }
            if opts.combined_includes_similar {
                parts.push(build_dataset(base, Scheme::ConcatSimilar, seed, opts)?.corpus);
            }
            Ok(Synthesis { corpus: combine(&parts)?, unused: Vec::new() })
        }
    }
}

/// Sidecar text mapping each new sentence id to its component ids:
/// `new_id<TAB>id,id,…`, or `-` for sentences without provenance.
pub fn provenance_sidecar(corpus: &Corpus) -> String {
    let mut out = String::new();
    for s in corpus.sentences() {
        let parts = match s.provenance() {
            Some(p) => p.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            None => "-".to_owned(),
        };
        out.push_str(&format!("{}\t{}\n", s.id(), parts));
    }
    out
}

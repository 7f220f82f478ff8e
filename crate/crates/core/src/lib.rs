//! Corpus tooling and a reproducible experiment pipeline for long-range
//! named entity recognition on IOB-tagged corpora such as MahaNER.
//!
//! The pieces, roughly in pipeline order:
//!
//! * [`tag`], [`corpus`], [`format`], [`stats`], [`iob`]: reading, checking
//!   and summarising three-column and CoNLL corpora.
//! * [`synth`]: seeded construction of the concatenated long-range datasets.
//! * [`tagger`]: an averaged structured perceptron with Viterbi decoding.
//! * [`chunker`]: sliding-window decoding for bounded-context taggers.
//! * [`eval`]: entity-level precision, recall and F1.
//! * [`experiment`]: the train × test matrix, end to end.
//!
//! The `book/` directory at the repository root walks through each of these;
//! its code samples are compiled and run as doctests of this crate.

pub mod chunker;
pub mod corpus;
pub mod eval;
pub mod experiment;
pub mod format;
pub mod iob;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod tag;
pub mod tagger;

pub use corpus::{Corpus, Sentence};
pub use tag::{LabelStyle, Tag};

/// The guide's chapters, compiled so their samples run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpora.md")]
    mod corpora {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/tagger.md")]
    mod tagger {}
    #[doc = include_str!("../../../book/src/windows.md")]
    mod windows {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

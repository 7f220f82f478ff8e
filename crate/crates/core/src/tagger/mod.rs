//! A small deterministic sequence labeller: averaged structured perceptron
//! over sparse string features, decoded with first-order Viterbi.

mod decode;
mod features;
mod model;
mod train;

use thiserror::Error;

pub use decode::{decode_indices, predict_corpus, sequence_score, viterbi_decode};
pub(crate) use decode::predict_with;
pub use features::{extract_features, FEATURE_VERSION, SENTENCE_END, SENTENCE_START};
pub use model::{TaggerModel, TrainMeta, MODEL_HEADER};
pub use train::{train, train_unaveraged, train_with_observer, TrainConfig};

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("model has no tags")]
    EmptyModel,
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("training sentence {sentence_id} is not well-formed IOB; repair it first")]
    IllFormedTraining { sentence_id: u64 },
    #[error("token index {index} out of range for sentence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unsupported model file version {0:?}")]
    UnknownVersion(String),
    #[error("model file line {line}: {reason}")]
    MalformedModelFile { line: usize, reason: String },
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

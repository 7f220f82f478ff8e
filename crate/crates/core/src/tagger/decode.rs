//! First-order Viterbi decoding.

use rayon::prelude::*;

use super::{TaggerError, TaggerModel};
use crate::corpus::{Corpus, Sentence};
use crate::tag::Tag;

/// `allowed[prev * n + cur]` and `start[cur]` for IOB-constrained decoding.
pub(crate) struct Constraints {
    pub start: Vec<bool>,
    pub allowed: Vec<bool>,
}

impl Constraints {
    pub fn new(tags: &[Tag], constrain: bool) -> Constraints {
        let n = tags.len();
        if !constrain {
            return Constraints { start: vec![true; n], allowed: vec![true; n * n] };
        }
        let start = tags.iter().map(|t| t.may_follow(None)).collect();
        let mut allowed = Vec::with_capacity(n * n);
        for prev in tags {
            allowed.extend(tags.iter().map(|cur| cur.may_follow(Some(prev))));
        }
        Constraints { start, allowed }
    }
}

/// Best tag-index path and its score.
///
/// Ties go to the smaller tag index, both when choosing a backpointer and
/// when choosing the final tag. `emissions` is `[position][tag]`,
/// `transitions` is row-major `[prev][cur]`.
pub(crate) fn best_path(
    emissions: &[Vec<f64>],
    transitions: &[f64],
    constraints: &Constraints,
) -> (Vec<usize>, f64) {
    let len = emissions.len();
    if len == 0 {
        return (Vec::new(), 0.0);
    }
    let n = emissions[0].len();
    let mut score: Vec<f64> = (0..n)
        .map(|t| if constraints.start[t] { emissions[0][t] } else { f64::NEG_INFINITY })
        .collect();
    let mut back = vec![vec![0usize; n]; len];
    let mut next = vec![0.0; n];

    for i in 1..len {
        for cur in 0..n {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for prev in 0..n {
                if !constraints.allowed[prev * n + cur] || score[prev] == f64::NEG_INFINITY {
                    continue;
                }
                let s = score[prev] + transitions[prev * n + cur];
                if s > best {
                    best = s;
                    arg = prev;
                }
            }
            back[i][cur] = arg;
            next[cur] = best + emissions[i][cur];
        }
        std::mem::swap(&mut score, &mut next);
    }

    let mut last = 0;
    for t in 1..n {
        if score[t] > score[last] {
            last = t;
        }
    }
    let total = score[last];
    let mut path = vec![last; len];
    for i in (1..len).rev() {
        path[i - 1] = back[i][path[i]];
    }
    (path, total)
}

/// Decodes one token sequence, returning tag indices into `model.tags()`
/// and the path score.
pub fn decode_indices<S: AsRef<str> + Sync>(
    model: &TaggerModel,
    tokens: &[S],
    constrain: bool,
) -> Result<(Vec<usize>, f64), TaggerError> {
    if model.tags().is_empty() {
        return Err(TaggerError::EmptyModel);
    }
    let emissions = model.emission_scores(tokens);
    let constraints = Constraints::new(model.tags(), constrain);
    Ok(best_path(&emissions, model.transition_matrix(), &constraints))
}

/// Highest-scoring tag sequence for `tokens`.
///
/// With `constrain`, `I-X` is only reachable from `B-X` or `I-X` and never
/// at position 0, so the output is always well-formed IOB.
pub fn viterbi_decode<S: AsRef<str> + Sync>(
    model: &TaggerModel,
    tokens: &[S],
    constrain: bool,
) -> Result<Vec<Tag>, TaggerError> {
    let (path, _) = decode_indices(model, tokens, constrain)?;
    Ok(path.into_iter().map(|t| model.tags()[t].clone()).collect())
}

/// Score of a given tag-index sequence under `model`.
pub fn sequence_score<S: AsRef<str>>(model: &TaggerModel, tokens: &[S], path: &[usize]) -> f64 {
    let emissions = model.emission_scores(tokens);
    let mut total = 0.0;
    for (i, &t) in path.iter().enumerate() {
        if i > 0 {
            total += model.transition(path[i - 1], t);
        }
        total += emissions[i][t];
    }
    total
}

/// Retags every sentence with the model's prediction. Sentences are decoded
/// in parallel; output order matches input order.
pub fn predict_corpus(model: &TaggerModel, corpus: &Corpus, constrain: bool) -> Result<Corpus, TaggerError> {
    predict_with(corpus, |s| viterbi_decode(model, s.tokens(), constrain))
}

pub(crate) fn predict_with<F>(corpus: &Corpus, decode: F) -> Result<Corpus, TaggerError>
where
    F: Fn(&Sentence) -> Result<Vec<Tag>, TaggerError> + Sync,
{
    let tags: Vec<Vec<Tag>> = corpus.sentences().par_iter().map(&decode).collect::<Result<_, _>>()?;
    let mut it = tags.into_iter();
    Ok(corpus.map_tags(|_| it.next().expect("one prediction per sentence"))?)
}

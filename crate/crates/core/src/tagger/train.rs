//! Averaged structured perceptron.
//!
//! Each sentence visit is one step. The sentence is decoded with the current
//! weights (IOB-constrained); if the prediction differs from the gold tags,
//! `learning_rate * (gold counts - predicted counts)` is added to the
//! emission and transition weights. Positions and transitions where gold and
//! prediction agree contribute nothing and are skipped.
//!
//! The returned weights are the mean of the weight vector after every step.
//! That mean is kept lazily: an update applied at step `s` also adds
//! `(s - 1) * delta` to an accumulator `u`, and after `T` steps the average
//! is `w - u / T`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::decode::{best_path, Constraints};
use super::features::{extract_features, FEATURE_VERSION};
use super::model::{TaggerModel, TrainMeta};
use super::TaggerError;
use crate::corpus::Corpus;
use crate::iob::is_well_formed;
use crate::rng::SplitMix64;
use crate::tag::Tag;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: u32,
    /// Epoch `e` (from 0) visits sentences in the order of a shuffle seeded
    /// with `shuffle_seed + e`.
    pub shuffle_seed: u64,
    /// Perceptron step size.
    pub learning_rate: f64,
    /// Sentences decoded before their updates are applied together.
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 5, shuffle_seed: 0, learning_rate: 1.0, batch_size: 1 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TaggerError> {
        if self.epochs == 0 {
            return Err(TaggerError::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TaggerError::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(TaggerError::InvalidConfig("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Dense weights plus the lazy-average accumulator.
#[derive(Debug, Clone)]
pub(crate) struct AveragedWeights {
    pub weights: Vec<f64>,
    pub accum: Vec<f64>,
}

impl AveragedWeights {
    pub fn zeros(len: usize) -> Self {
        AveragedWeights { weights: vec![0.0; len], accum: vec![0.0; len] }
    }

    /// Adds `delta` to entry `k` as part of step `step` (1-based).
    pub fn add(&mut self, k: usize, delta: f64, step: u64) {
        self.weights[k] += delta;
        self.accum[k] += (step - 1) as f64 * delta;
    }

    /// Mean of the weights after each of `steps` steps.
    pub fn average(&self, k: usize, steps: u64) -> f64 {
        if steps == 0 {
            return self.weights[k];
        }
        self.weights[k] - self.accum[k] / steps as f64
    }
}

struct Example {
    features: Vec<Vec<usize>>,
    gold: Vec<usize>,
}

struct Trainer {
    tags: Vec<Tag>,
    feature_names: Vec<String>,
    examples: Vec<Example>,
    emissions: AveragedWeights,
    transitions: AveragedWeights,
    constraints: Constraints,
    steps: u64,
}

impl Trainer {
    fn new(corpus: &Corpus) -> Trainer {
        let tags = TaggerModel::new(corpus.tags()).tags().to_vec();
        let index: HashMap<&Tag, usize> = tags.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut feature_names = Vec::new();
        let examples = corpus
            .sentences()
            .iter()
            .map(|s| {
                let features = (0..s.len())
                    .map(|i| {
                        extract_features(s.tokens(), i)
                            .expect("index in range")
                            .into_iter()
                            .map(|f| {
                                *ids.entry(f).or_insert_with_key(|f| {
                                    feature_names.push(f.clone());
                                    feature_names.len() - 1
                                })
                            })
                            .collect()
                    })
                    .collect();
                let gold = s.tags().iter().map(|t| index[t]).collect();
                Example { features, gold }
            })
            .collect();
        let n = tags.len();
        Trainer {
            constraints: Constraints::new(&tags, true),
            emissions: AveragedWeights::zeros(feature_names.len() * n),
            transitions: AveragedWeights::zeros(n * n),
            tags,
            feature_names,
            examples,
            steps: 0,
        }
    }

    fn decode(&self, ex: &Example) -> Vec<usize> {
        let n = self.tags.len();
        let emissions: Vec<Vec<f64>> = ex
            .features
            .iter()
            .map(|fs| {
                let mut scores = vec![0.0; n];
                for &f in fs {
                    for (t, s) in scores.iter_mut().enumerate() {
                        *s += self.emissions.weights[f * n + t];
                    }
                }
                scores
            })
            .collect();
        best_path(&emissions, &self.transitions.weights, &self.constraints).0
    }

    fn update(&mut self, ex: usize, predicted: &[usize], lr: f64, step: u64) {
        let n = self.tags.len();
        let ex = &self.examples[ex];
        let gold = &ex.gold;
        for i in 0..gold.len() {
            if gold[i] != predicted[i] {
                for &f in &ex.features[i] {
                    self.emissions.add(f * n + gold[i], lr, step);
                    self.emissions.add(f * n + predicted[i], -lr, step);
                }
            }
            if i > 0 && (gold[i - 1], gold[i]) != (predicted[i - 1], predicted[i]) {
                self.transitions.add(gold[i - 1] * n + gold[i], lr, step);
                self.transitions.add(predicted[i - 1] * n + predicted[i], -lr, step);
            }
        }
    }

    fn epoch(&mut self, epoch: u32, config: &TrainConfig) {
        let mut order: Vec<usize> = (0..self.examples.len()).collect();
        SplitMix64::new(config.shuffle_seed.wrapping_add(epoch as u64)).shuffle(&mut order);
        for batch in order.chunks(config.batch_size) {
            let predictions: Vec<Vec<usize>> =
                batch.iter().map(|&ex| self.decode(&self.examples[ex])).collect();
            // A batch's updates land on its last step.
            self.steps += batch.len() as u64;
            let step = self.steps;
            for (&ex, pred) in batch.iter().zip(&predictions) {
                if *pred != self.examples[ex].gold {
                    self.update(ex, pred, config.learning_rate, step);
                }
            }
        }
    }

    fn model(&self, averaged: bool, meta: TrainMeta) -> TaggerModel {
        let n = self.tags.len();
        let value = |w: &AveragedWeights, k: usize| {
            if averaged {
                w.average(k, self.steps)
            } else {
                w.weights[k]
            }
        };
        let mut emissions = HashMap::new();
        for (f, name) in self.feature_names.iter().enumerate() {
            let row: Vec<f64> = (0..n).map(|t| value(&self.emissions, f * n + t)).collect();
            if row.iter().any(|w| *w != 0.0) {
                emissions.insert(name.clone(), row);
            }
        }
        let transitions = (0..n * n).map(|k| value(&self.transitions, k)).collect();
        TaggerModel::from_parts(self.tags.clone(), emissions, transitions, averaged, meta)
    }
}

pub fn train(corpus: &Corpus, config: &TrainConfig) -> Result<TaggerModel, TaggerError> {
    train_with_observer(corpus, config, |_, _| {})
}

/// Like [`train`], handing the averaged model after each epoch (counted
/// from 1) to `observer`.
pub fn train_with_observer<F>(
    corpus: &Corpus,
    config: &TrainConfig,
    mut observer: F,
) -> Result<TaggerModel, TaggerError>
where
    F: FnMut(u32, &TaggerModel),
{
    config.validate()?;
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    if let Some(s) = corpus.sentences().iter().find(|s| !is_well_formed(s.tags())) {
        return Err(TaggerError::IllFormedTraining { sentence_id: s.id() });
    }
    let meta = TrainMeta { epochs: config.epochs, seed: config.shuffle_seed, feature_version: FEATURE_VERSION };
    let mut trainer = Trainer::new(corpus);
    for epoch in 0..config.epochs {
        trainer.epoch(epoch, config);
        observer(epoch + 1, &trainer.model(true, meta.clone()));
    }
    Ok(trainer.model(true, meta))
}

/// The last (non-averaged) weights. Exposed for checking the averaging.
pub fn train_unaveraged(corpus: &Corpus, config: &TrainConfig) -> Result<TaggerModel, TaggerError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    let meta = TrainMeta { epochs: config.epochs, seed: config.shuffle_seed, feature_version: FEATURE_VERSION };
    let mut trainer = Trainer::new(corpus);
    for epoch in 0..config.epochs {
        trainer.epoch(epoch, config);
    }
    Ok(trainer.model(false, meta))
}

//! Generators and brute-force reference implementations shared by the
//! integration tests. The references deliberately avoid the library's own
//! span extraction and dynamic programming.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use longner::rng::SplitMix64;
use longner::tag::{parse_tag, Prefix};
use longner::tagger::TaggerModel;
use longner::{Corpus, Sentence, Tag};

pub const TYPES3: [&str; 3] = ["NEP", "NEL", "NEO"];

const WORDS: [&str; 12] = ["राम", "गेला", "पुणे", "मुंबई", "आणि", "2023", "x", "ने", "१२", "Co.", "का", "शाळा"];

/// A random tag sequence over `types`. Orphan `I` tags appear unless
/// `well_formed` is set.
pub fn random_tags(rng: &mut SplitMix64, len: usize, types: &[&str], well_formed: bool) -> Vec<Tag> {
    let mut tags: Vec<Tag> = Vec::with_capacity(len);
    for _ in 0..len {
        let ty = types[rng.below(types.len() as u64) as usize];
        let tag = match rng.below(3) {
            0 => Tag::outside(),
            1 => Tag::begin(ty).unwrap(),
            _ => Tag::inside(ty).unwrap(),
        };
        let tag = if well_formed && !tag.may_follow(tags.last()) { tag.to_begin() } else { tag };
        tags.push(tag);
    }
    tags
}

pub fn random_sentence(rng: &mut SplitMix64, id: u64, max_len: usize, types: &[&str]) -> Sentence {
    let len = 1 + rng.below(max_len as u64) as usize;
    let tokens = (0..len).map(|_| WORDS[rng.below(WORDS.len() as u64) as usize].to_owned()).collect();
    Sentence::new(id, tokens, random_tags(rng, len, types, true)).unwrap()
}

/// A well-formed corpus with non-contiguous, unique ids.
pub fn random_corpus(seed: u64, sentences: usize, max_len: usize) -> Corpus {
    let mut rng = SplitMix64::new(seed);
    let mut id = rng.below(5);
    let out = (0..sentences)
        .map(|_| {
            let s = random_sentence(&mut rng, id, max_len, &longner::tag::MAHANER_TYPES);
            id += 1 + rng.below(3);
            s
        })
        .collect();
    Corpus::new(out).unwrap()
}

/// Spans as `(sentence, type, start, end)`, found by testing every interval
/// for being a maximal run that opens with `B-X` or an orphan `I-X`.
pub fn brute_spans(sentence: usize, tags: &[Tag]) -> BTreeSet<(usize, String, usize, usize)> {
    let ty = |t: &Tag| t.entity_type().map(str::to_owned);
    let continues = |i: usize, x: &str| tags[i].prefix() == Prefix::I && tags[i].entity_type() == Some(x);
    let mut out = BTreeSet::new();
    for start in 0..tags.len() {
        let Some(x) = ty(&tags[start]) else { continue };
        let opens = match tags[start].prefix() {
            Prefix::B => true,
            Prefix::I => start == 0 || tags[start - 1].entity_type() != Some(x.as_str()),
            Prefix::O => false,
        };
        if !opens {
            continue;
        }
        for end in start..tags.len() {
            let inner = (start + 1..=end).all(|i| continues(i, &x));
            let closed = end + 1 == tags.len() || !continues(end + 1, &x);
            if inner && closed {
                out.insert((sentence, x.clone(), start, end));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub p: f64,
    pub r: f64,
    pub f: f64,
}

fn prf(matched: usize, gold: usize, pred: usize) -> Prf {
    let p = if pred == 0 { 0.0 } else { matched as f64 / pred as f64 };
    let r = if gold == 0 { 0.0 } else { matched as f64 / gold as f64 };
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    Prf { p, r, f }
}

/// Micro and per-type scores from span-set intersection.
pub fn brute_scores(pairs: &[(Vec<Tag>, Vec<Tag>)]) -> (Prf, BTreeMap<String, Prf>) {
    let mut gold = BTreeSet::new();
    let mut pred = BTreeSet::new();
    for (i, (g, p)) in pairs.iter().enumerate() {
        gold.extend(brute_spans(i, g));
        pred.extend(brute_spans(i, p));
    }
    let hit: BTreeSet<_> = gold.intersection(&pred).cloned().collect();
    let types: BTreeSet<&String> = gold.iter().chain(&pred).map(|s| &s.1).collect();
    let per_type = types
        .into_iter()
        .map(|t| {
            let count = |set: &BTreeSet<(usize, String, usize, usize)>| set.iter().filter(|s| &s.1 == t).count();
            (t.clone(), prf(count(&hit), count(&gold), count(&pred)))
        })
        .collect();
    (prf(hit.len(), gold.len(), pred.len()), per_type)
}

/// Gold and predicted corpora over the same tokens.
pub fn paired_corpora(pairs: &[(Vec<Tag>, Vec<Tag>)]) -> (Corpus, Corpus) {
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for (i, (g, p)) in pairs.iter().enumerate() {
        let tokens: Vec<String> = (0..g.len()).map(|j| format!("t{j}")).collect();
        gold.push(Sentence::new(i as u64, tokens.clone(), g.clone()).unwrap());
        pred.push(Sentence::new(i as u64, tokens, p.clone()).unwrap());
    }
    (Corpus::new(gold).unwrap(), Corpus::new(pred).unwrap())
}

/// Random model over at most 5 tags with dyadic weights, so every path
/// score is computed exactly regardless of summation order.
pub fn random_model(rng: &mut SplitMix64, tokens: &[String]) -> TaggerModel {
    let pool = ["B-NEP", "I-NEP", "B-NEL", "I-NEL"];
    let take = 1 + rng.below(pool.len() as u64) as usize;
    let mut model = TaggerModel::new(pool[..take].iter().map(|t| parse_tag(t).unwrap()));
    let n = model.tags().len();
    let weight = |rng: &mut SplitMix64| (rng.below(65) as f64 - 32.0) / 8.0;
    for i in 0..tokens.len() {
        for f in longner::tagger::extract_features(tokens, i).unwrap() {
            if rng.below(3) == 0 {
                for t in 0..n {
                    model.set_emission(&f, t, weight(rng));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            model.set_transition(a, b, weight(rng));
        }
    }
    model
}

/// Best path by enumerating all `n^len` sequences. Constrained paths must be
/// well-formed IOB. Returns the first maximal path in lexicographic order.
pub fn brute_decode(model: &TaggerModel, tokens: &[String], constrain: bool) -> (Vec<usize>, f64) {
    let n = model.tags().len();
    let len = tokens.len();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut path = vec![0usize; len];
    for code in 0..n.pow(len as u32) {
        let mut c = code;
        for slot in path.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        let tag = |i: usize| &model.tags()[path[i]];
        let orphan = |i: usize| tag(i).is_inside() && (i == 0 || tag(i - 1).entity_type() != tag(i).entity_type());
        if constrain && (0..len).any(orphan) {
            continue;
        }
        let score = longner::tagger::sequence_score(model, tokens, &path);
        if best.as_ref().is_none_or(|(_, b)| score > *b) {
            best = Some((path.clone(), score));
        }
    }
    best.expect("at least the all-O path is allowed")
}

/// Tokens decide the tags: `b<type>` opens an entity, `i<type>` continues
/// it, `w<k>` is outside. Entities never touch, so every sentence is
/// well-formed and unambiguous.
pub fn separable_corpus(seed: u64, sentences: usize, min_len: usize, max_len: usize) -> Corpus {
    let types = ["NEP", "NEL", "NEO", "NEM", "NED"];
    let mut rng = SplitMix64::new(seed);
    let out = (0..sentences)
        .map(|id| {
            let len = min_len + rng.below((max_len - min_len + 1) as u64) as usize;
            let mut tokens = Vec::with_capacity(len);
            let mut tags = Vec::with_capacity(len);
            while tokens.len() < len {
                let room = len - tokens.len();
                if room >= 3 && rng.below(4) == 0 {
                    let ty = types[rng.below(5) as usize];
                    let lower = ty.to_lowercase();
                    tokens.extend([format!("b{lower}"), format!("i{lower}")]);
                    tags.extend([Tag::begin(ty).unwrap(), Tag::inside(ty).unwrap()]);
                }
                tokens.push(format!("w{}", rng.below(10)));
                tags.push(Tag::outside());
            }
            Sentence::new(id as u64, tokens, tags).unwrap()
        })
        .collect();
    Corpus::new(out).unwrap()
}

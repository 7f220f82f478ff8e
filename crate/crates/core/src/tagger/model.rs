use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::features::{extract_features, FEATURE_VERSION};
use super::TaggerError;
use crate::tag::{parse_tag, Tag};

pub const MODEL_HEADER: &str = "ner-model-v1";

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrainMeta {
    pub epochs: u32,
    pub seed: u64,
    pub feature_version: u32,
}

/// Emission and transition weights over a fixed, sorted tag list.
///
/// Tag indices follow canonical label order, which is also the order used to
/// break ties during decoding. The list always contains `O`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    tags: Vec<Tag>,
    emissions: HashMap<String, Vec<f64>>,
    /// Row-major `[previous][current]`.
    transitions: Vec<f64>,
    averaged: bool,
    meta: TrainMeta,
}

impl TaggerModel {
    /// An all-zero model over `tags` (plus `O`).
    pub fn new<I: IntoIterator<Item = Tag>>(tags: I) -> TaggerModel {
        let mut tags: Vec<Tag> = tags.into_iter().collect();
        tags.push(Tag::outside());
        tags.sort();
        tags.dedup();
        let n = tags.len();
        TaggerModel {
            tags,
            emissions: HashMap::new(),
            transitions: vec![0.0; n * n],
            averaged: false,
            meta: TrainMeta { feature_version: FEATURE_VERSION, ..TrainMeta::default() },
        }
    }

    /// A model with no tags at all. Only useful for exercising error paths.
    pub fn empty() -> TaggerModel {
        TaggerModel {
            tags: Vec::new(),
            emissions: HashMap::new(),
            transitions: Vec::new(),
            averaged: false,
            meta: TrainMeta::default(),
        }
    }

    pub(crate) fn from_parts(
        tags: Vec<Tag>,
        emissions: HashMap<String, Vec<f64>>,
        transitions: Vec<f64>,
        averaged: bool,
        meta: TrainMeta,
    ) -> TaggerModel {
        TaggerModel { tags, emissions, transitions, averaged, meta }
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag_index(&self, tag: &Tag) -> Option<usize> {
        self.tags.binary_search(tag).ok()
    }

    pub fn is_averaged(&self) -> bool {
        self.averaged
    }

    pub fn meta(&self) -> &TrainMeta {
        &self.meta
    }

    pub fn emission(&self, feature: &str, tag: usize) -> f64 {
        self.emissions.get(feature).map_or(0.0, |row| row[tag])
    }

    pub fn transition(&self, prev: usize, cur: usize) -> f64 {
        self.transitions[prev * self.tags.len() + cur]
    }

    pub fn set_emission(&mut self, feature: &str, tag: usize, weight: f64) {
        let n = self.tags.len();
        self.emissions.entry(feature.to_owned()).or_insert_with(|| vec![0.0; n])[tag] = weight;
    }

    pub fn set_transition(&mut self, prev: usize, cur: usize, weight: f64) {
        let n = self.tags.len();
        self.transitions[prev * n + cur] = weight;
    }

    /// Number of non-zero weights.
    pub fn weight_count(&self) -> usize {
        let e: usize = self.emissions.values().map(|r| r.iter().filter(|w| **w != 0.0).count()).sum();
        e + self.transitions.iter().filter(|w| **w != 0.0).count()
    }

    /// Per-position emission scores, `[position][tag]`. Features are summed
    /// in template order.
    pub fn emission_scores<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Vec<f64>> {
        let n = self.tags.len();
        (0..tokens.len())
            .map(|i| {
                let mut scores = vec![0.0; n];
                for f in extract_features(tokens, i).expect("index in range") {
                    if let Some(row) = self.emissions.get(&f) {
                        for (s, w) in scores.iter_mut().zip(row) {
                            *s += w;
                        }
                    }
                }
                scores
            })
            .collect()
    }

    pub(crate) fn transition_matrix(&self) -> &[f64] {
        &self.transitions
    }

    /// Plain-text model file. Weight lines are sorted; zero weights omitted.
    ///
    /// ```text
    /// ner-model-v1
    /// tags<TAB>B-NEP<TAB>O
    /// E<TAB>w=राम<TAB>B-NEP<TAB>1.0000000000000000e0
    /// M<TAB>averaged<TAB>true
    /// T<TAB>B-NEP<TAB>O<TAB>-5.0000000000000000e-1
    /// ```
    pub fn save(&self) -> String {
        let mut lines = Vec::new();
        for (feature, row) in &self.emissions {
            for (t, w) in row.iter().enumerate() {
                if *w != 0.0 {
                    lines.push(format!("E\t{feature}\t{}\t{}", self.tags[t], fmt_weight(*w)));
                }
            }
        }
        let n = self.tags.len();
        for (k, w) in self.transitions.iter().enumerate() {
            if *w != 0.0 {
                lines.push(format!("T\t{}\t{}\t{}", self.tags[k / n], self.tags[k % n], fmt_weight(*w)));
            }
        }
        lines.push(format!("M\taveraged\t{}", self.averaged));
        lines.push(format!("M\tepochs\t{}", self.meta.epochs));
        lines.push(format!("M\tseed\t{}", self.meta.seed));
        lines.sort_unstable();

        let mut out = String::new();
        writeln!(out, "{MODEL_HEADER}").unwrap();
        out.push_str("tags");
        for t in &self.tags {
            write!(out, "\t{t}").unwrap();
        }
        out.push('\n');
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    pub fn load(text: &str) -> Result<TaggerModel, TaggerError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
        let bad = |line: usize, reason: &str| TaggerError::MalformedModelFile { line, reason: reason.to_owned() };

        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty model file"))?;
        let header = header.trim_start_matches('\u{feff}');
        if header != MODEL_HEADER {
            return Err(TaggerError::UnknownVersion(header.to_owned()));
        }
        let (line_no, tag_line) = lines.next().ok_or_else(|| bad(2, "missing tag list"))?;
        let mut fields = tag_line.split('\t');
        if fields.next() != Some("tags") {
            return Err(bad(line_no, "expected tag list"));
        }
        let tags = fields
            .map(parse_tag)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(line_no, &e.to_string()))?;
        if !tags.windows(2).all(|w| w[0] < w[1]) || !tags.contains(&Tag::outside()) {
            return Err(bad(line_no, "tag list must be sorted, unique and contain O"));
        }

        let mut model = TaggerModel::new(tags);
        model.meta = TrainMeta::default();
        model.meta.feature_version = FEATURE_VERSION;
        let index = |model: &TaggerModel, raw: &str, line: usize| {
            parse_tag(raw)
                .ok()
                .and_then(|t| model.tag_index(&t))
                .ok_or_else(|| bad(line, &format!("unknown tag {raw:?}")))
        };
        let weight = |raw: &str, line: usize| {
            raw.parse::<f64>()
                .ok()
                .filter(|w| w.is_finite())
                .ok_or_else(|| bad(line, &format!("bad weight {raw:?}")))
        };

        for (line, text) in lines {
            if text.is_empty() {
                continue;
            }
            let f: Vec<&str> = text.split('\t').collect();
            match (f[0], f.len()) {
                ("E", 4) => {
                    let t = index(&model, f[2], line)?;
                    let w = weight(f[3], line)?;
                    model.set_emission(f[1], t, w);
                }
                ("T", 4) => {
                    let p = index(&model, f[1], line)?;
                    let c = index(&model, f[2], line)?;
                    let w = weight(f[3], line)?;
                    model.set_transition(p, c, w);
                }
                ("M", 3) => match f[1] {
                    "averaged" => model.averaged = f[2].parse().map_err(|_| bad(line, "bad flag"))?,
                    "epochs" => model.meta.epochs = f[2].parse().map_err(|_| bad(line, "bad epochs"))?,
                    "seed" => model.meta.seed = f[2].parse().map_err(|_| bad(line, "bad seed"))?,
                    _ => return Err(bad(line, "unknown metadata key")),
                },
                _ => return Err(bad(line, "unrecognised line")),
            }
        }
        Ok(model)
    }
}

/// 17 significant digits, enough to round-trip any f64.
fn fmt_weight(w: f64) -> String {
    format!("{w:.16e}")
}

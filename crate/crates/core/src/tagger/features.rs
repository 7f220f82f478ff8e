//! Feature templates, version 1.
//!
//! Per token: a bias, the word, its neighbours (`<s>` / `</s>` at the
//! sentence edges), prefixes and suffixes of 1 to 4 Unicode scalars, and
//! script/digit shape flags. Affixes matter for Marathi, where case markers
//! and postpositions attach directly to the stem.

use super::TaggerError;

/// Bumped whenever the template set changes. Part of the model file header.
pub const FEATURE_VERSION: u32 = 1;

pub const SENTENCE_START: &str = "<s>";
pub const SENTENCE_END: &str = "</s>";
const MAX_AFFIX: usize = 4;

pub fn extract_features<S: AsRef<str>>(tokens: &[S], index: usize) -> Result<Vec<String>, TaggerError> {
    if index >= tokens.len() {
        return Err(TaggerError::IndexOutOfRange { index, len: tokens.len() });
    }
    let word = tokens[index].as_ref();
    let prev = index.checked_sub(1).map_or(SENTENCE_START, |i| tokens[i].as_ref());
    let next = tokens.get(index + 1).map_or(SENTENCE_END, |t| t.as_ref());

    let mut out = Vec::with_capacity(4 + 2 * MAX_AFFIX + 3);
    out.push("bias".to_owned());
    out.push(format!("w={word}"));
    out.push(format!("prev={prev}"));
    out.push(format!("next={next}"));

    let chars: Vec<char> = word.chars().collect();
    for n in 1..=MAX_AFFIX.min(chars.len()) {
        out.push(format!("pre{n}={}", chars[..n].iter().collect::<String>()));
    }
    for n in 1..=MAX_AFFIX.min(chars.len()) {
        out.push(format!("suf{n}={}", chars[chars.len() - n..].iter().collect::<String>()));
    }

    if chars.iter().any(|c| c.is_numeric()) {
        out.push("shape=digit".to_owned());
    }
    if chars.iter().any(|&c| is_latin(c)) {
        out.push("shape=latin".to_owned());
    }
    if chars.iter().any(|&c| is_devanagari(c)) {
        out.push("shape=deva".to_owned());
    }
    Ok(out)
}

fn is_latin(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '\u{00C0}'..='\u{024F}' if c.is_alphabetic())
}

fn is_devanagari(c: char) -> bool {
    matches!(c, '\u{0900}'..='\u{097F}' | '\u{A8E0}'..='\u{A8FF}')
}

//! IOB labels.
//!
//! A [`Tag`] is a chunk prefix (`B`, `I` or `O`) plus an entity type for the
//! non-`O` prefixes. Two spellings are accepted on input: the compact form
//! used by the MahaNER release (`BNEM`, `IED`) and the hyphenated CoNLL form
//! (`B-NEM`, `I-ED`). The prefix is always the first character, so `BED`
//! is `B` + `ED`, never a type called `BED`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entity types of the MahaNER tagset.
pub const MAHANER_TYPES: [&str; 7] = ["NEP", "NEL", "NEO", "NEM", "NED", "NETI", "ED"];

/// The 15 raw labels of the MahaNER IOB release, in the order of its label table.
pub const MAHANER_LABELS: [&str; 15] = [
    "O", "BNEM", "BNEP", "BNEL", "BNEO", "INEP", "BNED", "INEO", "INEM", "BED", "BNETI", "INED",
    "INEL", "IED", "INETI",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("empty label")]
    EmptyLabel,
    #[error("malformed label {0:?}")]
    MalformedLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prefix {
    B,
    I,
    O,
}

/// How labels are written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelStyle {
    /// `BNEM`, as in the MahaNER files.
    PaperRaw,
    /// `B-NEM`.
    #[default]
    Hyphenated,
}

impl FromStr for LabelStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-raw" | "paper_raw" | "raw" => Ok(LabelStyle::PaperRaw),
            "hyphenated" => Ok(LabelStyle::Hyphenated),
            other => Err(format!("unknown label style {other:?}")),
        }
    }
}

/// One IOB label. `entity_type` is `None` exactly when the prefix is `O`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tag {
    prefix: Prefix,
    entity_type: Option<String>,
}

impl Tag {
    pub fn outside() -> Tag {
        Tag { prefix: Prefix::O, entity_type: None }
    }

    pub fn begin(entity_type: &str) -> Result<Tag, TagError> {
        Tag::with_prefix(Prefix::B, entity_type)
    }

    pub fn inside(entity_type: &str) -> Result<Tag, TagError> {
        Tag::with_prefix(Prefix::I, entity_type)
    }

    /// Builds a tag from parts, checking the type grammar.
    pub fn with_prefix(prefix: Prefix, entity_type: &str) -> Result<Tag, TagError> {
        match prefix {
            Prefix::O if entity_type.is_empty() => Ok(Tag::outside()),
            Prefix::O => Err(TagError::MalformedLabel(format!("O-{entity_type}"))),
            _ if valid_type(entity_type) => {
                Ok(Tag { prefix, entity_type: Some(entity_type.to_owned()) })
            }
            _ => Err(TagError::MalformedLabel(entity_type.to_owned())),
        }
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn entity_type(&self) -> Option<&str> {
        self.entity_type.as_deref()
    }

    pub fn is_outside(&self) -> bool {
        self.prefix == Prefix::O
    }

    pub fn is_begin(&self) -> bool {
        self.prefix == Prefix::B
    }

    pub fn is_inside(&self) -> bool {
        self.prefix == Prefix::I
    }

    /// `I-X` may follow only `B-X` or `I-X`. Anything may follow any tag
    /// when the current tag is not an `I`.
    pub fn may_follow(&self, previous: Option<&Tag>) -> bool {
        if !self.is_inside() {
            return true;
        }
        match previous {
            Some(p) => !p.is_outside() && p.entity_type == self.entity_type,
            None => false,
        }
    }

    /// The same type with a `B` prefix; `O` stays `O`.
    pub fn to_begin(&self) -> Tag {
        match self.prefix {
            Prefix::O => Tag::outside(),
            _ => Tag { prefix: Prefix::B, entity_type: self.entity_type.clone() },
        }
    }

    pub fn render(&self, style: LabelStyle) -> String {
        match (&self.entity_type, style) {
            (None, _) => "O".to_owned(),
            (Some(t), LabelStyle::Hyphenated) => format!("{}-{}", self.prefix_char(), t),
            (Some(t), LabelStyle::PaperRaw) => format!("{}{}", self.prefix_char(), t),
        }
    }

    fn prefix_char(&self) -> char {
        match self.prefix {
            Prefix::B => 'B',
            Prefix::I => 'I',
            Prefix::O => 'O',
        }
    }
}

fn valid_type(t: &str) -> bool {
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_uppercase())
}

/// Parses a raw label in either spelling. Surrounding whitespace is ignored.
///
/// ```
/// use longner::tag::{parse_tag, Prefix};
///
/// let t = parse_tag("BNEM").unwrap();
/// assert_eq!((t.prefix(), t.entity_type()), (Prefix::B, Some("NEM")));
/// assert_eq!(parse_tag("B-NEM").unwrap(), t);
/// assert_eq!(parse_tag("IED").unwrap().entity_type(), Some("ED"));
/// ```
pub fn parse_tag(raw: &str) -> Result<Tag, TagError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(TagError::EmptyLabel);
    }
    if raw == "O" {
        return Ok(Tag::outside());
    }
    let prefix = match raw.as_bytes()[0] {
        b'B' => Prefix::B,
        b'I' => Prefix::I,
        _ => return Err(TagError::MalformedLabel(raw.to_owned())),
    };
    let rest = &raw[1..];
    let ty = rest.strip_prefix('-').unwrap_or(rest);
    if !valid_type(ty) {
        return Err(TagError::MalformedLabel(raw.to_owned()));
    }
    Ok(Tag { prefix, entity_type: Some(ty.to_owned()) })
}

impl FromStr for Tag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tag(s)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(LabelStyle::Hyphenated))
    }
}

// Canonical order is the byte order of the hyphenated label. Since the hyphen
// always sits at byte 1, the compact spelling sorts identically.
impl Ord for Tag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.render(LabelStyle::Hyphenated).cmp(&other.render(LabelStyle::Hyphenated))
    }
}

impl PartialOrd for Tag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_tag(&s).map_err(serde::de::Error::custom)
    }
}

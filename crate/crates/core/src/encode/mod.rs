//! Rank-first BPE and long-token-first LBPE encoders, and decoding.
//!
//! Both encoders operate on one pretoken at a time and read only the
//! vocabulary: BPE merges the adjacent pair whose concatenation has the lowest
//! rank, LBPE marks the longest vocabulary spans first with sliding windows of
//! decreasing length.
//!
//! Characters outside the vocabulary never abort encoding. Each contiguous run
//! of them becomes one unknown token (`vocab.unknown_id()`) whose piece is the
//! original text, so `decode` is always lossless.

mod bpe;
mod lbpe;
pub mod naive;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::pretokenize::pretokenize;
use crate::vocab::{Encoding, TokenId, UnitSequence, Vocabulary};

pub use bpe::encode_bpe;
pub use lbpe::encode_lbpe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EncodeMode {
    #[serde(rename = "bpe")]
    BpeRankFirst,
    #[serde(rename = "lbpe")]
    LbpeLongestFirst,
}

impl EncodeMode {
    pub const ALL: [EncodeMode; 2] = [EncodeMode::BpeRankFirst, EncodeMode::LbpeLongestFirst];

    pub fn as_str(self) -> &'static str {
        match self {
            EncodeMode::BpeRankFirst => "bpe",
            EncodeMode::LbpeLongestFirst => "lbpe",
        }
    }
}

impl fmt::Display for EncodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown encode mode {0:?} (expected \"bpe\" or \"lbpe\")")]
pub struct ParseModeError(pub String);

impl FromStr for EncodeMode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bpe" => Ok(EncodeMode::BpeRankFirst),
            "lbpe" => Ok(EncodeMode::LbpeLongestFirst),
            other => Err(ParseModeError(other.to_owned())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("token id {id} is outside the vocabulary (size {size})")]
    InvalidTokenId { id: TokenId, size: usize },
}

/// Encodes one unit sequence under `mode`, without pretokenizing.
pub fn encode_units(units: &UnitSequence, vocab: &Vocabulary, mode: EncodeMode) -> Encoding {
    match mode {
        EncodeMode::BpeRankFirst => encode_bpe(units, vocab),
        EncodeMode::LbpeLongestFirst => encode_lbpe(units, vocab),
    }
}

/// Pretokenizes `text` with the vocabulary's rules and encodes every pretoken.
pub fn encode_text(text: &str, vocab: &Vocabulary, mode: EncodeMode) -> Encoding {
    let mut out = Encoding::default();
    for pt in pretokenize(text, vocab.pretokenizer()) {
        out.extend(encode_units(&UnitSequence::new(pt.text), vocab, mode));
    }
    out
}

pub fn decode(encoding: &Encoding, vocab: &Vocabulary) -> Result<String, DecodeError> {
    let mut out = String::with_capacity(encoding.source_byte_count);
    for (id, piece) in encoding.iter() {
        if id == vocab.unknown_id() {
            out.push_str(piece);
        } else {
            let piece = vocab.piece(id).ok_or(DecodeError::InvalidTokenId {
                id,
                size: vocab.len(),
            })?;
            out.push_str(piece);
        }
    }
    Ok(out)
}

/// Builds the output for final token spans over `units`.
///
/// `spans` lists `(start, len, token)` in position order; gaps between spans
/// are unknown runs.
pub(crate) fn assemble(
    units: &UnitSequence,
    vocab: &Vocabulary,
    spans: impl IntoIterator<Item = (usize, usize, TokenId)>,
) -> Encoding {
    let chars = units.units();
    let mut out = Encoding {
        source_char_count: chars.len(),
        source_byte_count: units.byte_len(),
        ..Encoding::default()
    };
    let mut cursor = 0;
    let mut unknown = String::new();
    let mut flush_unknown = |out: &mut Encoding, upto: usize, cursor: usize| {
        if upto > cursor {
            unknown.clear();
            unknown.extend(&chars[cursor..upto]);
            out.push(vocab.unknown_id(), &unknown);
        }
    };
    for (start, len, token) in spans {
        flush_unknown(&mut out, start, cursor);
        out.push(
            token,
            vocab.piece(token).expect("encoder emitted a ranked id"),
        );
        cursor = start + len;
    }
    flush_unknown(&mut out, chars.len(), cursor);
    out
}

/// Unit ids per position; `None` for characters without a unit token.
pub(crate) fn unit_ids(units: &UnitSequence, vocab: &Vocabulary) -> Vec<Option<TokenId>> {
    units.units().iter().map(|&c| vocab.unit_id(c)).collect()
}

//! Tokens, ranks and vocabularies.
//!
//! A [`Vocabulary`] is an ordered token list where the list position is the
//! token's rank. Lower rank means the token was added earlier during training
//! and therefore has higher merge priority for the rank-first encoder.
//!
//! Besides the rank-ordered list, a vocabulary carries three derived indexes
//! that the encoders share:
//!
//! * an exact-match piece index (`piece -> id`),
//! * a pair index answering "is `piece(a) + piece(b)` a token?" in O(1),
//! * a character trie used for per-position prefix walks.
//!
//! Vocabularies are immutable after construction and can be shared across
//! threads freely.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::pretokenize::PreTokenizerConfig;

/// Rank-index of a token. The unknown token uses `vocab.len()`.
pub type TokenId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabError {
    #[error("token pieces must be non-empty (id {0})")]
    EmptyPiece(TokenId),
    #[error("vocabulary violates {} invariant(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// A vocabulary entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    id: TokenId,
    piece: String,
    length: usize,
}

impl Token {
    pub fn new(id: TokenId, piece: impl Into<String>) -> Result<Self, VocabError> {
        let piece = piece.into();
        if piece.is_empty() {
            return Err(VocabError::EmptyPiece(id));
        }
        let length = piece.chars().count();
        Ok(Self { id, piece, length })
    }

    pub fn id(&self) -> TokenId {
        self.id
    }

    pub fn piece(&self) -> &str {
        &self.piece
    }

    /// Length in Unicode scalar values. Pieces are never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_unit(&self) -> bool {
        self.length == 1
    }
}

/// A broken vocabulary invariant, naming the offending token(s).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The same piece appears at more than one rank.
    DuplicatePiece { piece: String, ranks: Vec<TokenId> },
    /// A token's id differs from its list position.
    NonContiguousRank { position: usize, id: TokenId },
    /// The stored maximum token length disagrees with the tokens (or is zero).
    MaxLengthMismatch { stored: usize, actual: usize },
    /// A multi-character token is not the concatenation of two other tokens.
    NotDecomposable { id: TokenId, piece: String },
    /// A unit token is ranked after a multi-character token.
    UnitAfterMerged {
        id: TokenId,
        piece: String,
        first_merged: TokenId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePiece { piece, ranks } => {
                write!(f, "piece {piece:?} is duplicated at ranks {ranks:?}")
            }
            Violation::NonContiguousRank { position, id } => {
                write!(f, "token at position {position} carries id {id}")
            }
            Violation::MaxLengthMismatch { stored, actual } => {
                write!(f, "max token length is {stored}, tokens give {actual}")
            }
            Violation::NotDecomposable { id, piece } => {
                write!(f, "token {id} ({piece:?}) does not split into two tokens")
            }
            Violation::UnitAfterMerged {
                id,
                piece,
                first_merged,
            } => write!(
                f,
                "unit token {id} ({piece:?}) is ranked after merged token {first_merged}"
            ),
        }
    }
}

/// Provenance recorded by the trainer and carried through the vocabulary file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrainingMetadata {
    pub target_vocab_size: usize,
    pub min_pair_frequency: u64,
    pub corpus_fingerprint: u64,
    pub corpus_documents: u64,
}

/// Character trie over token pieces.
#[derive(Debug, Clone, Default)]
pub(crate) struct PieceTrie {
    nodes: Vec<TrieNode>,
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    // Sorted by char.
    children: Vec<(char, u32)>,
    token: Option<TokenId>,
}

impl PieceTrie {
    fn build(tokens: &[Token]) -> Self {
        let mut trie = PieceTrie {
            nodes: vec![TrieNode::default()],
        };
        for token in tokens {
            let mut node = 0usize;
            for c in token.piece().chars() {
                node = match trie.nodes[node]
                    .children
                    .binary_search_by_key(&c, |&(k, _)| k)
                {
                    Ok(i) => trie.nodes[node].children[i].1 as usize,
                    Err(i) => {
                        let next = trie.nodes.len();
                        trie.nodes.push(TrieNode::default());
                        trie.nodes[node].children.insert(i, (c, next as u32));
                        next
                    }
                };
            }
            // First occurrence wins, matching the piece index.
            trie.nodes[node].token.get_or_insert(token.id());
        }
        trie
    }

    pub(crate) const ROOT: u32 = 0;

    #[inline]
    pub(crate) fn step(&self, node: u32, c: char) -> Option<u32> {
        let children = &self.nodes[node as usize].children;
        children
            .binary_search_by_key(&c, |&(k, _)| k)
            .ok()
            .map(|i| children[i].1)
    }

    #[inline]
    pub(crate) fn token_at(&self, node: u32) -> Option<TokenId> {
        self.nodes[node as usize].token
    }
}

/// Rank-ordered token set plus the indexes the encoders need.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<Token>,
    max_token_length: usize,
    pretokenizer: PreTokenizerConfig,
    metadata: Option<TrainingMetadata>,
    piece_index: FxHashMap<String, TokenId>,
    pair_index: FxHashMap<(TokenId, TokenId), TokenId>,
    trie: PieceTrie,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
            && self.max_token_length == other.max_token_length
            && self.pretokenizer == other.pretokenizer
            && self.metadata == other.metadata
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// Builds a validated vocabulary from rank-ordered pieces.
    pub fn from_pieces<I, S>(
        pieces: I,
        pretokenizer: PreTokenizerConfig,
    ) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens = pieces
            .into_iter()
            .enumerate()
            .map(|(rank, piece)| Token::new(rank as TokenId, piece))
            .collect::<Result<Vec<_>, _>>()?;
        let max_token_length = tokens.iter().map(Token::len).max().unwrap_or(0);
        Self::from_parts(tokens, max_token_length, pretokenizer)
    }

    /// Builds a vocabulary and rejects it unless [`Vocabulary::validate`] is clean.
    pub fn from_parts(
        tokens: Vec<Token>,
        max_token_length: usize,
        pretokenizer: PreTokenizerConfig,
    ) -> Result<Self, VocabError> {
        let vocab = Self::from_parts_unchecked(tokens, max_token_length, pretokenizer);
        let violations = vocab.validate();
        if violations.is_empty() {
            Ok(vocab)
        } else {
            Err(VocabError::Invalid(violations))
        }
    }

    /// Builds the indexes without checking any invariant.
    ///
    /// Useful for hand-built vocabularies that are deliberately not closed
    /// under decomposition. When pieces repeat, the lowest rank wins every
    /// lookup.
    pub fn from_parts_unchecked(
        tokens: Vec<Token>,
        max_token_length: usize,
        pretokenizer: PreTokenizerConfig,
    ) -> Self {
        let mut piece_index = FxHashMap::with_capacity_and_hasher(tokens.len(), Default::default());
        for token in &tokens {
            piece_index
                .entry(token.piece().to_owned())
                .or_insert(token.id());
        }

        let mut pair_index = FxHashMap::default();
        for token in tokens.iter().filter(|t| !t.is_unit()) {
            let piece = token.piece();
            for (split, _) in piece.char_indices().skip(1) {
                let (left, right) = piece.split_at(split);
                if let (Some(&l), Some(&r)) = (piece_index.get(left), piece_index.get(right)) {
                    pair_index.entry((l, r)).or_insert(piece_index[piece]);
                }
            }
        }

        let trie = PieceTrie::build(&tokens);
        Self {
            tokens,
            max_token_length,
            pretokenizer,
            metadata: None,
            piece_index,
            pair_index,
            trie,
        }
    }

    pub fn with_metadata(mut self, metadata: TrainingMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    /// Lists every broken invariant; empty iff the vocabulary is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        let mut ranks_by_piece: FxHashMap<&str, Vec<TokenId>> = FxHashMap::default();
        for token in &self.tokens {
            ranks_by_piece
                .entry(token.piece())
                .or_default()
                .push(token.id());
        }
        let mut duplicates: Vec<_> = ranks_by_piece
            .into_iter()
            .filter(|(_, ranks)| ranks.len() > 1)
            .collect();
        duplicates.sort_by(|a, b| a.1.cmp(&b.1));
        violations.extend(
            duplicates
                .into_iter()
                .map(|(piece, ranks)| Violation::DuplicatePiece {
                    piece: piece.to_owned(),
                    ranks,
                }),
        );

        for (position, token) in self.tokens.iter().enumerate() {
            if token.id() as usize != position {
                violations.push(Violation::NonContiguousRank {
                    position,
                    id: token.id(),
                });
            }
        }

        let actual = self.tokens.iter().map(Token::len).max().unwrap_or(0);
        if actual != self.max_token_length || self.max_token_length == 0 {
            violations.push(Violation::MaxLengthMismatch {
                stored: self.max_token_length,
                actual,
            });
        }

        for token in self.tokens.iter().filter(|t| !t.is_unit()) {
            let piece = token.piece();
            let decomposable = piece.char_indices().skip(1).any(|(split, _)| {
                let (left, right) = piece.split_at(split);
                self.piece_index.contains_key(left) && self.piece_index.contains_key(right)
            });
            if !decomposable {
                violations.push(Violation::NotDecomposable {
                    id: token.id(),
                    piece: piece.to_owned(),
                });
            }
        }

        if let Some(first_merged) = self.tokens.iter().position(|t| !t.is_unit()) {
            for token in &self.tokens[first_merged..] {
                if token.is_unit() {
                    violations.push(Violation::UnitAfterMerged {
                        id: token.id(),
                        piece: token.piece().to_owned(),
                        first_merged: first_merged as TokenId,
                    });
                }
            }
        }

        violations
    }

    /// Number of ranked tokens (the unknown token is not counted).
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> Option<&Token> {
        self.tokens.get(id as usize)
    }

    pub fn piece(&self, id: TokenId) -> Option<&str> {
        self.token(id).map(Token::piece)
    }

    /// The reserved id for characters the vocabulary cannot cover.
    pub fn unknown_id(&self) -> TokenId {
        self.tokens.len() as TokenId
    }

    pub fn rank_of(&self, piece: &str) -> Option<TokenId> {
        self.piece_index.get(piece).copied()
    }

    /// The token whose piece is `piece(left) + piece(right)`, if any.
    #[inline]
    pub fn merge_of(&self, left: TokenId, right: TokenId) -> Option<TokenId> {
        self.pair_index.get(&(left, right)).copied()
    }

    pub fn unit_alphabet(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_unit())
    }

    pub fn unit_id(&self, c: char) -> Option<TokenId> {
        let mut buf = [0u8; 4];
        self.rank_of(c.encode_utf8(&mut buf))
    }

    pub fn max_token_length(&self) -> usize {
        self.max_token_length
    }

    pub fn pretokenizer(&self) -> &PreTokenizerConfig {
        &self.pretokenizer
    }

    pub fn metadata(&self) -> Option<&TrainingMetadata> {
        self.metadata.as_ref()
    }

    pub(crate) fn trie(&self) -> &PieceTrie {
        &self.trie
    }
}

/// The final token representation of a text.
///
/// Unknown tokens carry the source span they replaced as their piece, so the
/// encoding is always lossless.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Encoding {
    pub ids: Vec<TokenId>,
    pub pieces: Vec<String>,
    pub source_char_count: usize,
    pub source_byte_count: usize,
}

impl Encoding {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub(crate) fn push(&mut self, id: TokenId, piece: &str) {
        self.ids.push(id);
        self.pieces.push(piece.to_owned());
    }

    /// Appends `other`, summing the source counters.
    pub fn extend(&mut self, other: Encoding) {
        self.ids.extend(other.ids);
        self.pieces.extend(other.pieces);
        self.source_char_count += other.source_char_count;
        self.source_byte_count += other.source_byte_count;
    }

    pub fn iter(&self) -> impl Iterator<Item = (TokenId, &str)> {
        self.ids
            .iter()
            .copied()
            .zip(self.pieces.iter().map(String::as_str))
    }

    /// Character length of each emitted token (unknown spans included).
    pub fn token_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.pieces.iter().map(|p| p.chars().count())
    }
}

/// Marking of one position during long-token-first encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    pub token: TokenId,
    pub start: usize,
}

/// A text split into single-character units, with optional marks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnitSequence {
    units: Vec<char>,
    marks: Vec<Option<Mark>>,
}

impl UnitSequence {
    pub fn new(text: &str) -> Self {
        let units: Vec<char> = text.chars().collect();
        let marks = vec![None; units.len()];
        Self { units, marks }
    }

    pub fn units(&self) -> &[char] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn marks(&self) -> &[Option<Mark>] {
        &self.marks
    }

    pub fn is_marked(&self, position: usize) -> bool {
        self.marks[position].is_some()
    }

    /// Marks `[start, start + len)` as `token`.
    pub fn mark(&mut self, start: usize, len: usize, token: TokenId) {
        for slot in &mut self.marks[start..start + len] {
            *slot = Some(Mark { token, start });
        }
    }

    pub fn span(&self, start: usize, len: usize) -> String {
        self.units[start..start + len].iter().collect()
    }

    pub fn byte_len(&self) -> usize {
        self.units.iter().map(|c| c.len_utf8()).sum()
    }
}

impl From<&str> for UnitSequence {
    fn from(text: &str) -> Self {
        Self::new(text)
    }
}

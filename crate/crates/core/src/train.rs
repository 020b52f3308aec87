//! BPE vocabulary training.
//!
//! Training counts every distinct pretoken once with a weight equal to its
//! corpus frequency, ranks the unit characters by frequency, then repeatedly
//! merges the most frequent adjacent pair until the target size is reached or
//! no pair reaches `min_pair_frequency`.
//!
//! Ties between equally frequent pairs go to the lexicographically smallest
//! `(left piece, right piece)` in codepoint order, so a run is fully determined
//! by the corpus bytes and the config.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use thiserror::Error;

use crate::pretokenize::{pretokenize, PreTokenizerConfig};
use crate::vocab::{TokenId, TrainingMetadata, VocabError, Vocabulary};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("corpus contains no characters")]
    EmptyCorpus,
    #[error(
        "corpus has {alphabet} distinct characters but the target vocabulary size is {target}"
    )]
    AlphabetExceedsTarget { alphabet: usize, target: usize },
    #[error("min_pair_frequency must be at least 1")]
    ZeroMinPairFrequency,
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainerConfig {
    pub target_vocab_size: usize,
    pub min_pair_frequency: u64,
    pub pretokenizer: PreTokenizerConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            target_vocab_size: 2000,
            min_pair_frequency: 2,
            pretokenizer: PreTokenizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub left: TokenId,
    pub right: TokenId,
    pub frequency: u64,
}

/// One pretoken as merged so far, with its corpus weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSequence {
    pub symbols: Vec<TokenId>,
    pub weight: u64,
}

/// A single step of the merge loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub left: TokenId,
    pub right: TokenId,
    pub merged: TokenId,
    pub frequency: u64,
    /// False when the concatenation already existed and no token was added.
    pub new_token: bool,
}

#[derive(Debug, Clone)]
pub struct Training {
    pub vocab: Vocabulary,
    pub merges: Vec<MergeStep>,
}

/// The deduplicated pretoken table: the only corpus state training keeps.
#[derive(Debug, Clone, Default)]
pub struct PretokenCounts {
    counts: FxHashMap<String, u64>,
    documents: u64,
    fingerprint: Fingerprint,
}

impl PretokenCounts {
    pub fn from_corpus<I, S>(corpus: I, config: &PreTokenizerConfig) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts = Self::default();
        for doc in corpus {
            counts.add_document(doc.as_ref(), config);
        }
        counts
    }

    pub fn add_document(&mut self, doc: &str, config: &PreTokenizerConfig) {
        self.documents += 1;
        self.fingerprint.update(doc.as_bytes());
        for pt in pretokenize(doc, config) {
            match self.counts.get_mut(pt.text) {
                Some(n) => *n += 1,
                None => {
                    self.counts.insert(pt.text.to_owned(), 1);
                }
            }
        }
    }

    pub fn documents(&self) -> u64 {
        self.documents
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint.0
    }

    /// Distinct pretokens with weights, sorted by text.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut out: Vec<_> = self.counts.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        out.sort_unstable();
        out
    }

    /// Unit characters ordered by weighted frequency, descending, ties by codepoint.
    pub fn unit_ranking(&self) -> Vec<char> {
        let mut freq: FxHashMap<char, u64> = FxHashMap::default();
        for (text, weight) in &self.counts {
            for c in text.chars() {
                *freq.entry(c).or_default() += weight;
            }
        }
        let mut units: Vec<_> = freq.into_iter().collect();
        units.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        units.into_iter().map(|(c, _)| c).collect()
    }

    /// The pretoken table as unit-id sequences, in the order of [`Self::sorted`].
    pub fn unit_sequences(&self, units: &[char]) -> Vec<WeightedSequence> {
        let ids: FxHashMap<char, TokenId> = units
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as TokenId))
            .collect();
        self.sorted()
            .into_iter()
            .map(|(text, weight)| WeightedSequence {
                symbols: text.chars().map(|c| ids[&c]).collect(),
                weight,
            })
            .collect()
    }
}

/// FNV-1a over document bytes, with a 0xFF separator between documents.
#[derive(Debug, Clone, Copy)]
struct Fingerprint(u64);

impl Default for Fingerprint {
    fn default() -> Self {
        Fingerprint(0xcbf2_9ce4_8422_2325)
    }
}

impl Fingerprint {
    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes.iter().chain(std::iter::once(&0xFF)) {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Exact weighted counts of adjacent pairs, sorted by `(left, right)`.
pub fn count_pairs(sequences: &[WeightedSequence]) -> Vec<PairCount> {
    let mut counts: FxHashMap<(TokenId, TokenId), u64> = FxHashMap::default();
    for seq in sequences {
        for w in seq.symbols.windows(2) {
            *counts.entry((w[0], w[1])).or_default() += seq.weight;
        }
    }
    let mut out: Vec<_> = counts
        .into_iter()
        .map(|((left, right), frequency)| PairCount {
            left,
            right,
            frequency,
        })
        .collect();
    out.sort_unstable_by_key(|p| (p.left, p.right));
    out
}

/// Replaces every leftmost, non-overlapping occurrence of `pair` with `merged`.
pub fn apply_merge(sequences: &mut [WeightedSequence], pair: (TokenId, TokenId), merged: TokenId) {
    for seq in sequences {
        merge_symbols(&mut seq.symbols, pair, merged);
    }
}

/// Returns whether anything changed.
pub fn merge_symbols(
    symbols: &mut Vec<TokenId>,
    pair: (TokenId, TokenId),
    merged: TokenId,
) -> bool {
    let mut read = 0;
    let mut write = 0;
    let n = symbols.len();
    while read < n {
        if read + 1 < n && symbols[read] == pair.0 && symbols[read + 1] == pair.1 {
            symbols[write] = merged;
            read += 2;
        } else {
            symbols[write] = symbols[read];
            read += 1;
        }
        write += 1;
    }
    symbols.truncate(write);
    write != n
}

pub fn train<I, S>(corpus: I, config: &TrainerConfig) -> Result<Vocabulary, TrainError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    train_with_trace(corpus, config).map(|t| t.vocab)
}

pub fn train_with_trace<I, S>(corpus: I, config: &TrainerConfig) -> Result<Training, TrainError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let counts = PretokenCounts::from_corpus(corpus, &config.pretokenizer);
    train_from_counts(&counts, config)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    frequency: u64,
    left: Rc<str>,
    right: Rc<str>,
    pair: (TokenId, TokenId),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.frequency
            .cmp(&other.frequency)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct MergeState {
    pieces: Vec<Rc<str>>,
    piece_ids: FxHashMap<Rc<str>, TokenId>,
    words: Vec<WeightedSequence>,
    pair_counts: FxHashMap<(TokenId, TokenId), u64>,
    occurrences: FxHashMap<(TokenId, TokenId), FxHashSet<u32>>,
    heap: BinaryHeap<Candidate>,
}

impl MergeState {
    fn new(units: &[char], words: Vec<WeightedSequence>) -> Self {
        let pieces: Vec<Rc<str>> = units.iter().map(|c| Rc::from(c.to_string())).collect();
        let piece_ids = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as TokenId))
            .collect();
        let mut state = Self {
            pieces,
            piece_ids,
            words,
            pair_counts: FxHashMap::default(),
            occurrences: FxHashMap::default(),
            heap: BinaryHeap::new(),
        };
        for (idx, word) in state.words.iter().enumerate() {
            for w in word.symbols.windows(2) {
                let pair = (w[0], w[1]);
                *state.pair_counts.entry(pair).or_default() += word.weight;
                state
                    .occurrences
                    .entry(pair)
                    .or_default()
                    .insert(idx as u32);
            }
        }
        let mut pairs: Vec<_> = state.pair_counts.keys().copied().collect();
        pairs.sort_unstable();
        for pair in pairs {
            state.push_candidate(pair);
        }
        state
    }

    fn push_candidate(&mut self, pair: (TokenId, TokenId)) {
        let frequency = self.pair_counts.get(&pair).copied().unwrap_or(0);
        if frequency > 0 {
            self.heap.push(Candidate {
                frequency,
                left: self.pieces[pair.0 as usize].clone(),
                right: self.pieces[pair.1 as usize].clone(),
                pair,
            });
        }
    }

    fn pop_best(&mut self) -> Option<Candidate> {
        while let Some(c) = self.heap.pop() {
            if self.pair_counts.get(&c.pair).copied() == Some(c.frequency) {
                return Some(c);
            }
        }
        None
    }

    fn merge(&mut self, pair: (TokenId, TokenId)) -> (TokenId, bool) {
        let piece: Rc<str> = Rc::from(format!(
            "{}{}",
            self.pieces[pair.0 as usize], self.pieces[pair.1 as usize]
        ));
        let (merged, new_token) = match self.piece_ids.get(&piece) {
            Some(&id) => (id, false),
            None => {
                let id = self.pieces.len() as TokenId;
                self.pieces.push(piece.clone());
                self.piece_ids.insert(piece, id);
                (id, true)
            }
        };

        let mut affected: Vec<u32> = self
            .occurrences
            .remove(&pair)
            .map(|set| set.into_iter().collect())
            .unwrap_or_default();
        affected.sort_unstable();

        let mut deltas: FxHashMap<(TokenId, TokenId), i64> = FxHashMap::default();
        for idx in affected {
            let word = &mut self.words[idx as usize];
            let before: Vec<TokenId> = word.symbols.clone();
            if !merge_symbols(&mut word.symbols, pair, merged) {
                continue;
            }
            let weight = word.weight as i64;
            for w in before.windows(2) {
                *deltas.entry((w[0], w[1])).or_default() -= weight;
            }
            for w in word.symbols.windows(2) {
                *deltas.entry((w[0], w[1])).or_default() += weight;
                self.occurrences
                    .entry((w[0], w[1]))
                    .or_default()
                    .insert(idx);
            }
        }

        let mut changed: Vec<_> = deltas.into_iter().filter(|&(_, d)| d != 0).collect();
        changed.sort_unstable();
        for (p, delta) in changed {
            let count = self.pair_counts.entry(p).or_default();
            *count = (*count as i64 + delta) as u64;
            if *count == 0 {
                self.pair_counts.remove(&p);
            } else {
                self.push_candidate(p);
            }
        }
        (merged, new_token)
    }
}

pub fn train_from_counts(
    counts: &PretokenCounts,
    config: &TrainerConfig,
) -> Result<Training, TrainError> {
    if config.min_pair_frequency == 0 {
        return Err(TrainError::ZeroMinPairFrequency);
    }
    let units = counts.unit_ranking();
    if units.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    if units.len() > config.target_vocab_size {
        return Err(TrainError::AlphabetExceedsTarget {
            alphabet: units.len(),
            target: config.target_vocab_size,
        });
    }

    let mut state = MergeState::new(&units, counts.unit_sequences(&units));
    let mut merges = Vec::new();
    while state.pieces.len() < config.target_vocab_size {
        let Some(best) = state.pop_best() else { break };
        if best.frequency < config.min_pair_frequency {
            break;
        }
        let (merged, new_token) = state.merge(best.pair);
        merges.push(MergeStep {
            left: best.pair.0,
            right: best.pair.1,
            merged,
            frequency: best.frequency,
            new_token,
        });
    }

    let metadata = TrainingMetadata {
        target_vocab_size: config.target_vocab_size,
        min_pair_frequency: config.min_pair_frequency,
        corpus_fingerprint: counts.fingerprint(),
        corpus_documents: counts.documents(),
    };
    let vocab = Vocabulary::from_pieces(
        state.pieces.iter().map(|p| p.to_string()),
        config.pretokenizer,
    )?
    .with_metadata(metadata);
    Ok(Training { vocab, merges })
}

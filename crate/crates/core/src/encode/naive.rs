//! Reference encoders with no data-structure optimization.
//!
//! `encode_bpe_naive` rescans every adjacent pair on every step and tests
//! membership by concatenating the two pieces. `encode_lbpe_naive` executes the
//! sliding-window marking loop literally, building each span string and
//! checking every position of it for marks. They exist to check the optimized
//! encoders and to measure the quadratic baseline.

use super::assemble;
use crate::vocab::{Encoding, TokenId, UnitSequence, Vocabulary};

/// One merge performed by the rank-first reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BpeStep {
    /// Index into the sequence as it was before this step.
    pub position: usize,
    pub token: TokenId,
}

pub fn encode_bpe_naive(units: &UnitSequence, vocab: &Vocabulary) -> Encoding {
    encode_bpe_naive_traced(units, vocab).0
}

pub fn encode_bpe_naive_traced(
    units: &UnitSequence,
    vocab: &Vocabulary,
) -> (Encoding, Vec<BpeStep>) {
    let concat_rank = |left: TokenId, right: TokenId| {
        let mut piece = String::from(vocab.piece(left)?);
        piece.push_str(vocab.piece(right)?);
        vocab.rank_of(&piece)
    };
    rescan_bpe(units, vocab, concat_rank)
}

/// The rank-first rescan loop with a caller-supplied pair lookup.
///
/// `lookup(a, b)` must return the token whose piece is `piece(a) + piece(b)`.
/// The quadratic scan is unchanged whatever the lookup costs.
pub fn encode_bpe_rescan<F>(units: &UnitSequence, vocab: &Vocabulary, lookup: F) -> Encoding
where
    F: FnMut(TokenId, TokenId) -> Option<TokenId>,
{
    rescan_bpe(units, vocab, lookup).0
}

fn rescan_bpe<F>(
    units: &UnitSequence,
    vocab: &Vocabulary,
    mut lookup: F,
) -> (Encoding, Vec<BpeStep>)
where
    F: FnMut(TokenId, TokenId) -> Option<TokenId>,
{
    // (token or None for unknown, start, len)
    let mut seq: Vec<(Option<TokenId>, usize, usize)> = units
        .units()
        .iter()
        .enumerate()
        .map(|(i, &c)| (vocab.unit_id(c), i, 1))
        .collect();
    let mut steps = Vec::new();

    loop {
        let mut best: Option<(TokenId, usize)> = None;
        for i in 0..seq.len().saturating_sub(1) {
            let (Some(left), Some(right)) = (seq[i].0, seq[i + 1].0) else {
                continue;
            };
            if let Some(rank) = lookup(left, right) {
                if best.is_none_or(|(b, _)| rank < b) {
                    best = Some((rank, i));
                }
            }
        }
        let Some((token, i)) = best else { break };
        let (_, _, right_len) = seq.remove(i + 1);
        seq[i].0 = Some(token);
        seq[i].2 += right_len;
        steps.push(BpeStep { position: i, token });
    }

    let spans = seq
        .into_iter()
        .filter_map(|(token, start, len)| token.map(|t| (start, len, t)));
    (assemble(units, vocab, spans), steps)
}

/// Literal sliding-window marking, longest window first.
pub fn encode_lbpe_naive(units: &UnitSequence, vocab: &Vocabulary) -> Encoding {
    let mut r0 = units.clone();
    let n = r0.len();
    let mut window = vocab.max_token_length();
    while window > 0 {
        if window <= n {
            for i in 0..=n - window {
                let span = r0.span(i, window);
                if let Some(token) = vocab.rank_of(&span) {
                    if (i..i + window).all(|x| !r0.is_marked(x)) {
                        r0.mark(i, window, token);
                    }
                }
            }
        }
        window -= 1;
    }

    let mut spans = Vec::new();
    let mut pos = 0;
    while pos < n {
        match r0.marks()[pos] {
            Some(mark) => {
                let len = vocab.token(mark.token).map_or(1, |t| t.len());
                spans.push((pos, len, mark.token));
                pos += len;
            }
            None => pos += 1,
        }
    }
    assemble(units, vocab, spans)
}

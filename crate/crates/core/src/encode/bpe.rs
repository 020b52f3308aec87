use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{assemble, unit_ids};
use crate::vocab::{Encoding, TokenId, UnitSequence, Vocabulary};

const NIL: usize = usize::MAX;

/// Rank-first encoding: repeatedly merge the adjacent pair whose concatenation
/// has the lowest rank in the vocabulary, leftmost first among equal ranks.
///
/// Runs in O(n log n) with a doubly linked list over positions and a min-heap
/// of `(rank, position)` candidates that are revalidated when popped.
pub fn encode_bpe(units: &UnitSequence, vocab: &Vocabulary) -> Encoding {
    let ids = unit_ids(units, vocab);
    let mut spans = Vec::with_capacity(ids.len());
    let mut start = 0;
    while start < ids.len() {
        if ids[start].is_none() {
            start += 1;
            continue;
        }
        let end = ids[start..]
            .iter()
            .position(Option::is_none)
            .map_or(ids.len(), |p| start + p);
        let segment: Vec<TokenId> = ids[start..end].iter().map(|id| id.unwrap()).collect();
        merge_segment(&segment, vocab, start, &mut spans);
        start = end;
    }
    assemble(units, vocab, spans)
}

fn merge_segment(
    segment: &[TokenId],
    vocab: &Vocabulary,
    offset: usize,
    spans: &mut Vec<(usize, usize, TokenId)>,
) {
    let n = segment.len();
    let mut symbols = segment.to_vec();
    let mut lengths = vec![1usize; n];
    let mut next: Vec<usize> = (1..=n).map(|i| if i == n { NIL } else { i }).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| if i == 0 { NIL } else { i - 1 }).collect();

    let mut heap = BinaryHeap::with_capacity(n);
    for i in 0..n.saturating_sub(1) {
        if let Some(rank) = vocab.merge_of(symbols[i], symbols[i + 1]) {
            heap.push(Reverse((rank, i)));
        }
    }

    while let Some(Reverse((rank, pos))) = heap.pop() {
        let right = next[pos];
        // Dead nodes have had their `next` cleared; the pair must still form `rank`.
        if right == NIL || vocab.merge_of(symbols[pos], symbols[right]) != Some(rank) {
            continue;
        }
        symbols[pos] = rank;
        lengths[pos] += lengths[right];
        let after = next[right];
        next[pos] = after;
        next[right] = NIL;
        if after != NIL {
            prev[after] = pos;
        }
        let before = prev[pos];
        if before != NIL {
            if let Some(r) = vocab.merge_of(symbols[before], symbols[pos]) {
                heap.push(Reverse((r, before)));
            }
        }
        if after != NIL {
            if let Some(r) = vocab.merge_of(symbols[pos], symbols[after]) {
                heap.push(Reverse((r, pos)));
            }
        }
    }

    let mut pos = if n == 0 { NIL } else { 0 };
    while pos != NIL {
        spans.push((offset + pos, lengths[pos], symbols[pos]));
        pos = next[pos];
    }
}

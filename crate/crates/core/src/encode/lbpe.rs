use std::cell::RefCell;

use super::assemble;
use crate::vocab::{Encoding, PieceTrie, TokenId, UnitSequence, Vocabulary};

const NONE: TokenId = TokenId::MAX;

/// Long-token-first encoding.
///
/// For window lengths `l = m, m-1, ..., 1` and positions `i` ascending, the
/// span `[i, i+l)` is marked as its token when it is a vocabulary piece and
/// none of its positions is marked yet. Unmarked positions left after `l = 1`
/// are unknown.
///
/// Every span matched at each start is collected with one trie walk per
/// position, so the whole pass is O(m * n). The overlap test is O(1): all
/// marks placed before window `l` are at least `l` long, so any of them that
/// overlaps `[i, i+l)` must cover `i` or `i+l-1`.
pub fn encode_lbpe(units: &UnitSequence, vocab: &Vocabulary) -> Encoding {
    SCRATCH.with(|scratch| match scratch.try_borrow_mut() {
        Ok(mut scratch) => encode_with(units, vocab, &mut scratch),
        Err(_) => encode_with(units, vocab, &mut Scratch::default()),
    })
}

/// Buffers reused across calls on one thread; encoding many short pretokens
/// would otherwise allocate all of them per pretoken.
#[derive(Default)]
struct Scratch {
    matches: Vec<(u32, TokenId)>,
    grouped: Vec<(u32, TokenId)>,
    per_len: Vec<usize>,
    offsets: Vec<usize>,
    fill: Vec<usize>,
    marked: Vec<bool>,
    chosen: Vec<TokenId>,
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

fn reset<T: Clone>(v: &mut Vec<T>, len: usize, value: T) {
    v.clear();
    v.resize(len, value);
}

fn encode_with(units: &UnitSequence, vocab: &Vocabulary, s: &mut Scratch) -> Encoding {
    let chars = units.units();
    let n = chars.len();
    assert!(n < u32::MAX as usize, "unit sequence too long");
    let m = vocab.max_token_length();
    let trie = vocab.trie();

    // Every (start, token) match in start order, then regrouped by length
    // with a stable counting sort so each group stays in start order.
    s.matches.clear();
    reset(&mut s.per_len, m + 2, 0);
    for start in 0..n {
        let mut node = PieceTrie::ROOT;
        for (offset, &c) in chars[start..n.min(start + m)].iter().enumerate() {
            match trie.step(node, c) {
                Some(child) => node = child,
                None => break,
            }
            if let Some(token) = trie.token_at(node) {
                s.matches.push((start as u32, token));
                s.per_len[offset + 1] += 1;
            }
        }
    }
    // offsets[l] is where length l begins; longer lengths come first.
    reset(&mut s.offsets, m + 2, 0);
    for len in (1..=m).rev() {
        s.offsets[len] = s.offsets[len + 1] + s.per_len[len + 1];
    }
    reset(&mut s.grouped, s.matches.len(), (0, 0));
    s.fill.clone_from(&s.offsets);
    for &(start, token) in &s.matches {
        let len = vocab.tokens()[token as usize].len();
        s.grouped[s.fill[len]] = (start, token);
        s.fill[len] += 1;
    }

    reset(&mut s.marked, n, false);
    // Token chosen at each start position, NONE elsewhere.
    reset(&mut s.chosen, n, NONE);
    for len in (1..=m).rev() {
        let group = s.offsets[len]..s.offsets[len] + s.per_len[len];
        for &(start, token) in &s.grouped[group] {
            let start = start as usize;
            let end = start + len;
            if s.marked[start] || s.marked[end - 1] {
                continue;
            }
            s.marked[start..end].fill(true);
            s.chosen[start] = token;
        }
    }

    let spans = s
        .chosen
        .iter()
        .enumerate()
        .filter(|&(_, &token)| token != NONE)
        .map(|(start, &token)| (start, vocab.tokens()[token as usize].len(), token));
    let encoding = assemble(units, vocab, spans);
    if s.matches.capacity() > RETAIN_LIMIT {
        *s = Scratch::default();
    }
    encoding
}

/// Buffers past this many matches are released instead of kept for reuse.
const RETAIN_LIMIT: usize = 1 << 16;

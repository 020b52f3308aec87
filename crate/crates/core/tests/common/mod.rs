#![allow(dead_code)]

pub mod frozen;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use lbpe_core::encode::naive::{encode_bpe_naive, encode_lbpe_naive};
use lbpe_core::io::{load_vocab, read_all, CorpusSource};
use lbpe_core::{
    pretokenize, EncodeMode, Encoding, PreTokenizerConfig, TokenId, UnitSequence, Vocabulary,
};
use rand::Rng;

pub const GOLDEN_VOCAB_SIZE: usize = 2000;
pub const GOLDEN_MIN_PAIR_FREQUENCY: u64 = 2;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn corpus_dir() -> PathBuf {
    data_dir().join("mini-corpus")
}

pub fn golden_path(name: &str) -> PathBuf {
    data_dir().join("golden").join(name)
}

pub fn corpus() -> &'static [String] {
    static DOCS: OnceLock<Vec<String>> = OnceLock::new();
    DOCS.get_or_init(|| read_all(&CorpusSource::plain([corpus_dir()])).expect("mini-corpus"))
}

pub fn golden_vocab() -> &'static Vocabulary {
    static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
    VOCAB.get_or_init(|| load_vocab(golden_path("vocab-2000.txt")).expect("golden vocabulary"))
}

/// 64-bit FNV-1a over the little-endian bytes of an id stream.
pub fn fnv_ids<'a>(ids: impl IntoIterator<Item = &'a TokenId>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for id in ids {
        for b in id.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Encodes a text through the reference encoders, pretoken by pretoken.
pub fn oracle_encode_text(text: &str, vocab: &Vocabulary, mode: EncodeMode) -> Encoding {
    let mut out = Encoding::default();
    for pt in pretokenize(text, vocab.pretokenizer()) {
        let units = UnitSequence::new(pt.text);
        let part = match mode {
            EncodeMode::BpeRankFirst => encode_bpe_naive(&units, vocab),
            EncodeMode::LbpeLongestFirst => encode_lbpe_naive(&units, vocab),
        };
        out.extend(part);
    }
    out
}

/// Random text drawn mostly from the vocabulary's own pieces, with some
/// arbitrary scalars mixed in.
pub fn random_text<R: Rng>(rng: &mut R, vocab: &Vocabulary, max_chars: usize) -> String {
    let target = rng.gen_range(0..=max_chars);
    let mut text = String::new();
    let mut chars = 0;
    while chars < target {
        let piece: String = match rng.gen_range(0..10) {
            0 => random_scalar(rng).to_string(),
            1 => [' ', '\n', '\t', '0', '7', ',', '.'][rng.gen_range(0..7)].to_string(),
            _ => {
                let id = rng.gen_range(0..vocab.len()) as TokenId;
                vocab.piece(id).unwrap().to_owned()
            }
        };
        for c in piece.chars() {
            if chars == target {
                break;
            }
            text.push(c);
            chars += 1;
        }
    }
    text
}

pub fn random_scalar<R: Rng>(rng: &mut R) -> char {
    loop {
        let pick = match rng.gen_range(0..4) {
            0 => rng.gen_range(0x20..0x7f),
            1 => rng.gen_range(0xa0..0x3000),
            2 => rng.gen_range(0x1f300..0x1fa00),
            _ => rng.gen_range(0..0x11_0000),
        };
        if let Some(c) = char::from_u32(pick) {
            return c;
        }
    }
}

/// One step of the brute-force trainer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMerge {
    pub left: String,
    pub right: String,
    pub frequency: u64,
}

/// Trainer written from the definition: recount every pair from scratch on
/// every step, pick the highest count, break ties by (left piece, right piece).
pub fn brute_force_train(
    docs: &[String],
    config: &PreTokenizerConfig,
    target: usize,
    min_pair_frequency: u64,
    max_steps: Option<usize>,
) -> (Vec<String>, Vec<OracleMerge>) {
    let mut weights: HashMap<String, u64> = HashMap::new();
    for doc in docs {
        for pt in pretokenize(doc, config) {
            *weights.entry(pt.text.to_owned()).or_default() += 1;
        }
    }
    let mut unit_freq: HashMap<char, u64> = HashMap::new();
    for (text, w) in &weights {
        for c in text.chars() {
            *unit_freq.entry(c).or_default() += w;
        }
    }
    let mut units: Vec<(char, u64)> = unit_freq.into_iter().collect();
    units.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut pieces: Vec<String> = units.iter().map(|(c, _)| c.to_string()).collect();
    let mut index: HashMap<String, u32> = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i as u32))
        .collect();
    let mut seqs: Vec<(Vec<u32>, u64)> = weights
        .iter()
        .map(|(text, &w)| (text.chars().map(|c| index[&c.to_string()]).collect(), w))
        .collect();

    let mut merges = Vec::new();
    while pieces.len() < target && max_steps.is_none_or(|m| merges.len() < m) {
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for (s, w) in &seqs {
            for pair in s.windows(2) {
                *counts.entry((pair[0], pair[1])).or_default() += w;
            }
        }
        let best = counts.into_iter().max_by(|a, b| {
            a.1.cmp(&b.1).then_with(|| {
                let ka = (&pieces[a.0 .0 as usize], &pieces[a.0 .1 as usize]);
                let kb = (&pieces[b.0 .0 as usize], &pieces[b.0 .1 as usize]);
                kb.cmp(&ka)
            })
        });
        let Some(((l, r), frequency)) = best else {
            break;
        };
        if frequency < min_pair_frequency {
            break;
        }
        let joined = format!("{}{}", pieces[l as usize], pieces[r as usize]);
        let merged = match index.get(&joined) {
            Some(&id) => id,
            None => {
                let id = pieces.len() as u32;
                pieces.push(joined.clone());
                index.insert(joined, id);
                id
            }
        };
        merges.push(OracleMerge {
            left: pieces[l as usize].clone(),
            right: pieces[r as usize].clone(),
            frequency,
        });
        for (s, _) in &mut seqs {
            let mut out = Vec::with_capacity(s.len());
            let mut i = 0;
            while i < s.len() {
                if i + 1 < s.len() && s[i] == l && s[i + 1] == r {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(s[i]);
                    i += 1;
                }
            }
            *s = out;
        }
    }
    (pieces, merges)
}

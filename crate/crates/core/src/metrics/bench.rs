//! Wall-clock scaling of the optimized long-token-first encoder against the
//! quadratic rank-first rescan.
//!
//! Each size encodes a synthetic text as a single unit sequence (no
//! pretokenization, so the whole text is one merge domain) and records the
//! median of several single-threaded runs after a warm-up run.

use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::MetricsError;
use crate::encode::encode_lbpe;
use crate::encode::naive::encode_bpe_rescan;
use crate::vocab::{TokenId, UnitSequence, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchEncoder {
    LbpeOptimized,
    BpeNaive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub encoder: BenchEncoder,
    pub size_bytes: usize,
    pub tokens: usize,
    #[serde(skip)]
    pub median: Duration,
    /// Median time relative to the previous size of the same encoder.
    #[serde(skip)]
    pub growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub runs: usize,
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    pub fn rows_for(&self, encoder: BenchEncoder) -> impl Iterator<Item = &ScalingRow> {
        self.rows.iter().filter(move |r| r.encoder == encoder)
    }

    /// Growth factors between consecutive sizes for `encoder`.
    pub fn growth(&self, encoder: BenchEncoder) -> Vec<f64> {
        self.rows_for(encoder).filter_map(|r| r.growth).collect()
    }
}

/// Repeats `source` until `size` bytes, cut back to a character boundary.
pub fn synthetic_text(source: &str, size: usize) -> String {
    if source.is_empty() {
        return String::new();
    }
    let mut text = String::with_capacity(size + source.len());
    while text.len() < size {
        text.push_str(source);
    }
    let mut cut = size;
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    text.truncate(cut);
    text
}

/// Dense pair table for the rescan baseline, so its cost is dominated by the
/// scan itself rather than hashing. Falls back to the hashed pair index for
/// large vocabularies.
struct PairTable<'v> {
    vocab: &'v Vocabulary,
    dense: Option<Vec<TokenId>>,
}

const DENSE_LIMIT: usize = 4096;

impl<'v> PairTable<'v> {
    fn new(vocab: &'v Vocabulary) -> Self {
        let n = vocab.len();
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut table = vec![TokenId::MAX; n * n];
            for a in 0..n as TokenId {
                for b in 0..n as TokenId {
                    if let Some(t) = vocab.merge_of(a, b) {
                        table[a as usize * n + b as usize] = t;
                    }
                }
            }
            table
        });
        Self { vocab, dense }
    }

    #[inline]
    fn get(&self, a: TokenId, b: TokenId) -> Option<TokenId> {
        match &self.dense {
            Some(table) => {
                let t = table[a as usize * self.vocab.len() + b as usize];
                (t != TokenId::MAX).then_some(t)
            }
            None => self.vocab.merge_of(a, b),
        }
    }
}

/// Median of `runs` timed calls after one untimed warm-up call.
fn median_of<F: FnMut() -> usize>(runs: usize, mut f: F) -> (Duration, usize) {
    black_box(f());
    let mut times = Vec::with_capacity(runs);
    let mut tokens = 0;
    for _ in 0..runs.max(1) {
        let start = Instant::now();
        tokens = black_box(f());
        times.push(start.elapsed());
    }
    times.sort_unstable();
    (times[times.len() / 2], tokens)
}

/// Times both encoders at each size in `sizes` (bytes, strictly ascending).
/// A size of zero is skipped.
pub fn bench_scaling(
    vocab: &Vocabulary,
    source: &str,
    sizes: &[usize],
    runs: usize,
) -> Result<ScalingReport, MetricsError> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MetricsError::SizesNotAscending);
    }
    let table = PairTable::new(vocab);
    let mut rows: Vec<ScalingRow> = Vec::new();
    for encoder in [BenchEncoder::LbpeOptimized, BenchEncoder::BpeNaive] {
        let mut previous: Option<Duration> = None;
        for &size in sizes.iter().filter(|&&s| s > 0) {
            let units = UnitSequence::new(&synthetic_text(source, size));
            let (median, tokens) = match encoder {
                BenchEncoder::LbpeOptimized => median_of(runs, || encode_lbpe(&units, vocab).len()),
                BenchEncoder::BpeNaive => median_of(runs, || {
                    encode_bpe_rescan(&units, vocab, |a, b| table.get(a, b)).len()
                }),
            };
            let growth = previous.map(|p| median.as_secs_f64() / p.as_secs_f64().max(1e-12));
            previous = Some(median);
            rows.push(ScalingRow {
                encoder,
                size_bytes: size,
                tokens,
                median,
                growth,
            });
        }
    }
    Ok(ScalingReport { runs, rows })
}

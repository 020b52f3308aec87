//! Token-length distribution, bytes-per-token compression and the
//! side-by-side encoder comparison built from them.

mod bench;

use std::fmt::{self, Write as _};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::encode::{encode_text, EncodeMode};
use crate::vocab::{Encoding, Vocabulary};

pub use bench::{bench_scaling, synthetic_text, BenchEncoder, ScalingReport, ScalingRow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("length buckets must be disjoint and cover [1, inf): {0}")]
    BadBuckets(String),
    #[error("benchmark sizes must be strictly ascending")]
    SizesNotAscending,
}

/// Inclusive token-length range; `max: None` is open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LengthRange {
    pub min: usize,
    pub max: Option<usize>,
}

impl LengthRange {
    pub const fn new(min: usize, max: usize) -> Self {
        Self {
            min,
            max: Some(max),
        }
    }

    pub const fn from(min: usize) -> Self {
        Self { min, max: None }
    }

    pub fn contains(&self, len: usize) -> bool {
        len >= self.min && self.max.is_none_or(|max| len <= max)
    }
}

impl fmt::Display for LengthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(max) => write!(f, "{}-{}", self.min, max),
            None => write!(f, "{}+", self.min),
        }
    }
}

impl Serialize for LengthRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// 1-3, 4-6, 7-9, 10-12, 13-15 and an open 16+ bucket.
pub const DEFAULT_BUCKETS: [LengthRange; 6] = [
    LengthRange::new(1, 3),
    LengthRange::new(4, 6),
    LengthRange::new(7, 9),
    LengthRange::new(10, 12),
    LengthRange::new(13, 15),
    LengthRange::from(16),
];

fn check_buckets(ranges: &[LengthRange]) -> Result<(), MetricsError> {
    let mut expected_min = 1;
    for (i, range) in ranges.iter().enumerate() {
        if range.min != expected_min {
            return Err(MetricsError::BadBuckets(format!(
                "bucket {range} starts at {} but {expected_min} is next",
                range.min
            )));
        }
        match range.max {
            Some(max) if max < range.min => {
                return Err(MetricsError::BadBuckets(format!("bucket {range} is empty")))
            }
            Some(max) => expected_min = max + 1,
            None if i + 1 == ranges.len() => return Ok(()),
            None => {
                return Err(MetricsError::BadBuckets(format!(
                    "open bucket {range} is not last"
                )))
            }
        }
    }
    Err(MetricsError::BadBuckets(format!(
        "lengths from {expected_min} are not covered"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthHistogram {
    pub buckets: Vec<(LengthRange, u64)>,
    pub total_tokens: u64,
}

impl LengthHistogram {
    pub fn new(ranges: &[LengthRange]) -> Result<Self, MetricsError> {
        check_buckets(ranges)?;
        Ok(Self {
            buckets: ranges.iter().map(|&r| (r, 0)).collect(),
            total_tokens: 0,
        })
    }

    pub fn add(&mut self, len: usize) {
        if let Some((_, count)) = self.buckets.iter_mut().find(|(r, _)| r.contains(len)) {
            *count += 1;
            self.total_tokens += 1;
        }
    }

    pub fn add_encoding(&mut self, encoding: &Encoding) {
        for len in encoding.token_lengths() {
            self.add(len);
        }
    }

    pub fn count(&self, range: LengthRange) -> Option<u64> {
        self.buckets
            .iter()
            .find(|(r, _)| *r == range)
            .map(|&(_, c)| c)
    }

    /// Adds another histogram over the same buckets.
    pub fn merge(&mut self, other: &LengthHistogram) {
        assert_eq!(
            self.buckets.len(),
            other.buckets.len(),
            "bucket layouts differ"
        );
        for ((r, a), (q, b)) in self.buckets.iter_mut().zip(&other.buckets) {
            assert_eq!(r, q, "bucket layouts differ");
            *a += b;
        }
        self.total_tokens += other.total_tokens;
    }
}

/// Counts token lengths (in characters) into `ranges`.
pub fn length_distribution<I>(
    lengths: I,
    ranges: &[LengthRange],
) -> Result<LengthHistogram, MetricsError>
where
    I: IntoIterator<Item = usize>,
{
    let mut hist = LengthHistogram::new(ranges)?;
    for len in lengths {
        hist.add(len);
    }
    Ok(hist)
}

/// Source bytes and emitted tokens for one encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompressionReport {
    pub mode: EncodeMode,
    pub total_bytes: u64,
    pub total_tokens: u64,
}

impl CompressionReport {
    pub fn new(mode: EncodeMode) -> Self {
        Self {
            mode,
            total_bytes: 0,
            total_tokens: 0,
        }
    }

    /// Average UTF-8 bytes per token; zero when nothing was encoded.
    pub fn bytes_per_token(&self) -> f64 {
        if self.total_tokens == 0 {
            0.0
        } else {
            self.total_bytes as f64 / self.total_tokens as f64
        }
    }

    pub fn add(&mut self, source_bytes: usize, encoding: &Encoding) {
        self.total_bytes += source_bytes as u64;
        self.total_tokens += encoding.len() as u64;
    }

    pub fn merge(&mut self, other: &CompressionReport) {
        assert_eq!(
            self.mode, other.mode,
            "cannot merge reports of different modes"
        );
        self.total_bytes += other.total_bytes;
        self.total_tokens += other.total_tokens;
    }
}

impl Serialize for CompressionReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CompressionReport", 4)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("total_bytes", &self.total_bytes)?;
        st.serialize_field("total_tokens", &self.total_tokens)?;
        st.serialize_field("bytes_per_token", &self.bytes_per_token())?;
        st.end()
    }
}

pub fn compression_rate<I, S>(corpus: I, vocab: &Vocabulary, mode: EncodeMode) -> CompressionReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut report = CompressionReport::new(mode);
    for doc in corpus {
        let doc = doc.as_ref();
        report.add(doc.len(), &encode_text(doc, vocab, mode));
    }
    report
}

/// Compression and length distribution of one encoder over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub compression: CompressionReport,
    pub histogram: LengthHistogram,
}

impl ModeSummary {
    pub fn new(mode: EncodeMode, ranges: &[LengthRange]) -> Result<Self, MetricsError> {
        Ok(Self {
            compression: CompressionReport::new(mode),
            histogram: LengthHistogram::new(ranges)?,
        })
    }

    pub fn add(&mut self, source: &str, encoding: &Encoding) {
        self.compression.add(source.len(), encoding);
        self.histogram.add_encoding(encoding);
    }

    pub fn merge(&mut self, other: &ModeSummary) {
        self.compression.merge(&other.compression);
        self.histogram.merge(&other.histogram);
    }

    pub fn mode(&self) -> EncodeMode {
        self.compression.mode
    }
}

pub fn summarize<I, S>(
    corpus: I,
    vocab: &Vocabulary,
    mode: EncodeMode,
    ranges: &[LengthRange],
) -> Result<ModeSummary, MetricsError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut summary = ModeSummary::new(mode, ranges)?;
    for doc in corpus {
        let doc = doc.as_ref();
        summary.add(doc, &encode_text(doc, vocab, mode));
    }
    Ok(summary)
}

/// Relative change from `baseline` to `candidate`, in percent.
fn relative_percent(baseline: u64, candidate: u64) -> Option<f64> {
    (baseline != 0).then(|| (candidate as f64 - baseline as f64) / baseline as f64 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketDelta {
    pub range: LengthRange,
    pub baseline: u64,
    pub candidate: u64,
    pub delta: i64,
    /// `(candidate - baseline) / baseline * 100`; absent for an empty baseline bucket.
    pub relative_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub baseline: ModeSummary,
    pub candidate: ModeSummary,
    pub buckets: Vec<BucketDelta>,
    pub token_delta: i64,
    pub token_relative_percent: Option<f64>,
}

pub fn compare(baseline: &ModeSummary, candidate: &ModeSummary) -> Comparison {
    let buckets = baseline
        .histogram
        .buckets
        .iter()
        .zip(&candidate.histogram.buckets)
        .map(|(&(range, b), &(other, c))| {
            assert_eq!(range, other, "bucket layouts differ");
            BucketDelta {
                range,
                baseline: b,
                candidate: c,
                delta: c as i64 - b as i64,
                relative_percent: relative_percent(b, c),
            }
        })
        .collect();
    let (b, c) = (
        baseline.compression.total_tokens,
        candidate.compression.total_tokens,
    );
    Comparison {
        baseline: baseline.clone(),
        candidate: candidate.clone(),
        buckets,
        token_delta: c as i64 - b as i64,
        token_relative_percent: relative_percent(b, c),
    }
}

/// Encodes every document under both modes, with rank-first BPE as the baseline.
pub fn compare_encoders<I, S>(corpus: I, vocab: &Vocabulary) -> Comparison
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut bpe = ModeSummary::new(EncodeMode::BpeRankFirst, &DEFAULT_BUCKETS).unwrap();
    let mut lbpe = ModeSummary::new(EncodeMode::LbpeLongestFirst, &DEFAULT_BUCKETS).unwrap();
    for doc in corpus {
        let doc = doc.as_ref();
        bpe.add(doc, &encode_text(doc, vocab, EncodeMode::BpeRankFirst));
        lbpe.add(doc, &encode_text(doc, vocab, EncodeMode::LbpeLongestFirst));
    }
    compare(&bpe, &lbpe)
}

fn fmt_percent(p: Option<f64>) -> String {
    match p {
        Some(p) => format!("{p:+.4}%"),
        None => "n/a".to_owned(),
    }
}

impl Comparison {
    /// Fixed-width text report: compression table, then per-bucket counts
    /// with relative deltas.
    pub fn render(&self) -> String {
        let b = &self.baseline;
        let c = &self.candidate;
        let mut out = String::new();
        let bl = b.mode().as_str().to_uppercase();
        let cl = c.mode().as_str().to_uppercase();
        writeln!(out, "{:<16}{:>14}{:>14}", "", bl, cl).unwrap();
        writeln!(
            out,
            "{:<16}{:>14}{:>14}",
            "bytes", b.compression.total_bytes, c.compression.total_bytes
        )
        .unwrap();
        writeln!(
            out,
            "{:<16}{:>14}{:>14}",
            "tokens", b.compression.total_tokens, c.compression.total_tokens
        )
        .unwrap();
        writeln!(
            out,
            "{:<16}{:>14.4}{:>14.4}",
            "bytes/token",
            b.compression.bytes_per_token(),
            c.compression.bytes_per_token()
        )
        .unwrap();
        writeln!(
            out,
            "{:<16}{:>28}",
            "token delta",
            format!(
                "{:+} ({})",
                self.token_delta,
                fmt_percent(self.token_relative_percent)
            )
        )
        .unwrap();
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<16}{:>14}{:>14}{:>14}",
            "length", bl, cl, "rel. delta"
        )
        .unwrap();
        for d in &self.buckets {
            writeln!(
                out,
                "{:<16}{:>14}{:>14}{:>14}",
                d.range.to_string(),
                d.baseline,
                d.candidate,
                fmt_percent(d.relative_percent)
            )
            .unwrap();
        }
        out
    }
}

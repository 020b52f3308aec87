use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lbpe_core::io::CorpusSource;
use lbpe_core::EncodeMode;

#[derive(Debug, Parser)]
#[command(
    name = "lbpe",
    version,
    about = "Train BPE vocabularies and encode with rank-first or long-token-first merging"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a vocabulary and write it to a file.
    Train(TrainArgs),
    /// Encode text into tokens.
    Encode(EncodeArgs),
    /// Decode the output of `encode` back into text.
    Decode(DecodeArgs),
    /// Token-length histogram and bytes per token over a corpus.
    Stats(StatsArgs),
    /// Side-by-side BPE vs LBPE report over a corpus.
    Compare(CompareArgs),
    /// Time optimized LBPE against the naive BPE rescan on growing inputs.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus files or directories (directories expand to their files in name order).
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    /// Read JSON-lines records and take this string field as the document text.
    #[arg(long, value_name = "FIELD")]
    pub records: Option<String>,
}

impl CorpusArgs {
    pub fn source(&self) -> CorpusSource {
        match &self.records {
            Some(field) => CorpusSource::records(&self.corpus, field),
            None => CorpusSource::plain(&self.corpus),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Target vocabulary size, unit tokens included.
    #[arg(long, value_name = "N")]
    pub vocab_size: usize,
    /// Stop once the most frequent pair occurs fewer times than this.
    #[arg(long, value_name = "K", default_value_t = 2)]
    pub min_pair_freq: u64,
    /// Keep digit runs together instead of splitting every digit.
    #[arg(long)]
    pub no_split_digits: bool,
    /// Do not attach a single leading space to the following letter run.
    #[arg(long)]
    pub no_leading_space: bool,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bpe,
    Lbpe,
}

impl From<Mode> for EncodeMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Bpe => EncodeMode::BpeRankFirst,
            Mode::Lbpe => EncodeMode::LbpeLongestFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TokenFormat {
    /// Space-separated ids; unknown runs are written `ID:ESCAPED`.
    Ids,
    /// Space-separated escaped pieces.
    Pieces,
    /// One JSON array of {"id", "piece"} objects per line.
    Json,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long, value_name = "FILE")]
    pub vocab: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = TokenFormat::Ids)]
    pub output: TokenFormat,
    /// Read from this file instead of stdin.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Encode the whole input as one text instead of line by line.
    #[arg(long)]
    pub document: bool,
    /// Worker threads for line mode; output order is preserved.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, value_name = "FILE")]
    pub vocab: PathBuf,
    /// Format of the encoded input.
    #[arg(long, value_enum, default_value_t = TokenFormat::Ids)]
    pub format: TokenFormat,
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_name = "FILE")]
    pub vocab: PathBuf,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Only this encoder; both when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_name = "FILE")]
    pub vocab: PathBuf,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_name = "FILE")]
    pub vocab: PathBuf,
    /// Source text, repeated to each size.
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Input sizes in bytes, strictly ascending.
    #[arg(long, value_delimiter = ',', default_values_t = [65536, 131072])]
    pub sizes: Vec<usize>,
    /// Timed runs per size; the median is reported.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(1..))]
    pub runs: u16,
}

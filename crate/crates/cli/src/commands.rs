use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use lbpe_core::io::{
    load_vocab, read_corpus, save_vocab, CorpusError, CorpusSource, VocabFileError,
};
use lbpe_core::metrics::{
    bench_scaling, compare, summarize, BenchEncoder, MetricsError, ModeSummary, DEFAULT_BUCKETS,
};
use lbpe_core::train::train_with_trace;
use lbpe_core::{
    encode_text, EncodeMode, PreTokenizerConfig, TrainError, TrainerConfig, Vocabulary,
};
use thiserror::Error;

use crate::args::{BenchArgs, CompareArgs, DecodeArgs, EncodeArgs, StatsArgs, TrainArgs};
use crate::format::{decode_line, render};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Vocab {
        path: PathBuf,
        source: VocabFileError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("cannot read {name}: {source}")]
    Input { name: String, source: io::Error },
    #[error("{name} is not valid UTF-8")]
    NotUtf8 { name: String },
    #[error("line {line}: {message}")]
    Decode { line: usize, message: String },
    #[error(transparent)]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn vocab(path: &Path) -> Result<Vocabulary> {
    load_vocab(path).map_err(|source| CliError::Vocab {
        path: path.to_owned(),
        source,
    })
}

fn read_input(path: Option<&Path>) -> Result<String> {
    let (name, bytes) = match path {
        Some(p) => (
            p.display().to_string(),
            fs::read(p).map_err(|source| CliError::Input {
                name: p.display().to_string(),
                source,
            })?,
        ),
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|source| CliError::Input {
                    name: "stdin".into(),
                    source,
                })?;
            ("stdin".to_owned(), buf)
        }
    };
    String::from_utf8(bytes).map_err(|_| CliError::NotUtf8 { name })
}

/// Documents of `source`, stopping at the first read error.
fn documents(source: &CorpusSource) -> Result<Vec<String>> {
    let mut reader = read_corpus(source)?;
    let docs = reader
        .by_ref()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if reader.replacements() > 0 {
        eprintln!(
            "warning: replaced {} invalid UTF-8 sequence(s) with U+FFFD",
            reader.replacements()
        );
    }
    Ok(docs)
}

pub fn train(args: &TrainArgs, out: &mut impl Write) -> Result<()> {
    let config = TrainerConfig {
        target_vocab_size: args.vocab_size,
        min_pair_frequency: args.min_pair_freq,
        pretokenizer: PreTokenizerConfig {
            split_digits: !args.no_split_digits,
            attach_leading_space: !args.no_leading_space,
        },
    };
    let mut reader = read_corpus(&args.corpus.source())?;
    let mut error = None;
    let docs = reader.by_ref().map_while(|doc| match doc {
        Ok(d) => Some(d),
        Err(e) => {
            error = Some(e);
            None
        }
    });
    let training = train_with_trace(docs, &config);
    if let Some(e) = error {
        return Err(e.into());
    }
    let training = training?;
    if reader.replacements() > 0 {
        eprintln!(
            "warning: replaced {} invalid UTF-8 sequence(s) with U+FFFD",
            reader.replacements()
        );
    }
    save_vocab(&training.vocab, &args.out).map_err(|source| CliError::Vocab {
        path: args.out.clone(),
        source,
    })?;
    writeln!(
        out,
        "vocab size {}, merges {}",
        training.vocab.len(),
        training.merges.len()
    )?;
    Ok(())
}

/// Splits after every newline, keeping the terminator with its line.
fn lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n').collect()
}

pub fn encode(args: &EncodeArgs, out: &mut impl Write) -> Result<()> {
    let vocab = vocab(&args.vocab)?;
    let text = read_input(args.input.as_deref())?;
    if text.is_empty() {
        return Ok(());
    }
    let mode = EncodeMode::from(args.mode);
    let units: Vec<&str> = if args.document {
        vec![&text]
    } else {
        lines(&text)
    };
    let encode_one = |s: &&str| render(&encode_text(s, &vocab, mode), &vocab, args.output);

    let jobs = usize::from(args.jobs).min(units.len());
    let rendered: Vec<String> = if jobs <= 1 {
        units.iter().map(encode_one).collect()
    } else {
        let chunk = units.len().div_ceil(jobs);
        std::thread::scope(|s| {
            let handles: Vec<_> = units
                .chunks(chunk)
                .map(|c| s.spawn(|| c.iter().map(encode_one).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("encoder thread panicked"))
                .collect()
        })
    };
    for line in rendered {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn decode(args: &DecodeArgs, out: &mut impl Write) -> Result<()> {
    let vocab = vocab(&args.vocab)?;
    let input = read_input(args.input.as_deref())?;
    for (i, line) in input.lines().enumerate() {
        let text = decode_line(line, &vocab, args.format).map_err(|message| CliError::Decode {
            line: i + 1,
            message,
        })?;
        out.write_all(text.as_bytes())?;
    }
    Ok(())
}

fn render_summary(s: &ModeSummary) -> String {
    let mut text = format!(
        "mode {}\nbytes {}\ntokens {}\nbytes/token {:.4}\n",
        s.mode(),
        s.compression.total_bytes,
        s.compression.total_tokens,
        s.compression.bytes_per_token()
    );
    for (range, count) in &s.histogram.buckets {
        text.push_str(&format!("length {range} {count}\n"));
    }
    text
}

pub fn stats(args: &StatsArgs, out: &mut impl Write) -> Result<()> {
    let vocab = vocab(&args.vocab)?;
    let docs = documents(&args.corpus.source())?;
    let modes: Vec<EncodeMode> = match args.mode {
        Some(m) => vec![m.into()],
        None => EncodeMode::ALL.to_vec(),
    };
    let summaries = modes
        .into_iter()
        .map(|mode| summarize(&docs, &vocab, mode, &DEFAULT_BUCKETS))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&summaries).expect("summaries serialize")
        )?;
    } else {
        let blocks: Vec<String> = summaries.iter().map(render_summary).collect();
        write!(out, "{}", blocks.join("\n"))?;
    }
    Ok(())
}

pub fn compare_cmd(args: &CompareArgs, out: &mut impl Write) -> Result<()> {
    let vocab = vocab(&args.vocab)?;
    let docs = documents(&args.corpus.source())?;
    let bpe = summarize(&docs, &vocab, EncodeMode::BpeRankFirst, &DEFAULT_BUCKETS)?;
    let lbpe = summarize(
        &docs,
        &vocab,
        EncodeMode::LbpeLongestFirst,
        &DEFAULT_BUCKETS,
    )?;
    let report = compare(&bpe, &lbpe);
    if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        )?;
    } else {
        write!(out, "{}", report.render())?;
    }
    Ok(())
}

pub fn bench(args: &BenchArgs, out: &mut impl Write) -> Result<()> {
    let vocab = vocab(&args.vocab)?;
    let source = documents(&args.corpus.source())?.concat();
    if source.is_empty() {
        return Err(CliError::Usage("the bench corpus is empty".into()));
    }
    let report = bench_scaling(&vocab, &source, &args.sizes, args.runs.into())?;
    for encoder in [BenchEncoder::LbpeOptimized, BenchEncoder::BpeNaive] {
        for row in report.rows_for(encoder) {
            let growth = row.growth.map_or("-".to_owned(), |g| format!("x{g:.4}"));
            eprintln!(
                "{:<16}{:>10} bytes{:>12.4} ms  {growth}",
                serde_json::to_value(encoder)
                    .expect("encoder serializes")
                    .as_str()
                    .unwrap_or(""),
                row.size_bytes,
                row.median.as_secs_f64() * 1e3,
            );
        }
    }
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    )?;
    Ok(())
}

//! The vocabulary file: a line-oriented text document.
//!
//! ```text
//! lbpe-vocab 1
//! split_digits true
//! attach_leading_space true
//! max_token_length 9
//! target_vocab_size 2000        # these four lines appear together
//! min_pair_frequency 2          # or not at all
//! corpus_fingerprint 3f1c0a9e5d7b2a41
//! corpus_documents 24
//! tokens 2000
//! 0 e
//! 1 \s
//! ...
//! ```
//!
//! Each token line is `<id> <escaped piece>`; see [`super::escape`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::escape::{escape_piece, unescape_piece};
use crate::pretokenize::PreTokenizerConfig;
use crate::vocab::{Token, TokenId, TrainingMetadata, Violation, VocabError, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "lbpe-vocab";

#[derive(Debug, Error)]
pub enum VocabFileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unsupported vocabulary format (header {0:?}, expected \"{MAGIC} {FORMAT_VERSION}\")")]
    FormatVersionUnsupported(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("vocabulary failed validation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ValidationFailed(Vec<Violation>),
}

pub fn vocab_to_string(vocab: &Vocabulary) -> String {
    let mut out = String::new();
    let cfg = vocab.pretokenizer();
    writeln!(out, "{MAGIC} {FORMAT_VERSION}").unwrap();
    writeln!(out, "split_digits {}", cfg.split_digits).unwrap();
    writeln!(out, "attach_leading_space {}", cfg.attach_leading_space).unwrap();
    writeln!(out, "max_token_length {}", vocab.max_token_length()).unwrap();
    if let Some(meta) = vocab.metadata() {
        writeln!(out, "target_vocab_size {}", meta.target_vocab_size).unwrap();
        writeln!(out, "min_pair_frequency {}", meta.min_pair_frequency).unwrap();
        writeln!(out, "corpus_fingerprint {:016x}", meta.corpus_fingerprint).unwrap();
        writeln!(out, "corpus_documents {}", meta.corpus_documents).unwrap();
    }
    writeln!(out, "tokens {}", vocab.len()).unwrap();
    for token in vocab.tokens() {
        writeln!(out, "{} {}", token.id(), escape_piece(token.piece())).unwrap();
    }
    out
}

pub fn save_vocab(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<(), VocabFileError> {
    let path = path.as_ref();
    fs::write(path, vocab_to_string(vocab)).map_err(|source| VocabFileError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn load_vocab(path: impl AsRef<Path>) -> Result<Vocabulary, VocabFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| VocabFileError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_vocab(&text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<&'a str> {
        self.inner.next().map(|(i, l)| {
            self.last = i + 1;
            l
        })
    }

    fn malformed(&self, message: impl Into<String>) -> VocabFileError {
        VocabFileError::Malformed {
            line: self.last,
            message: message.into(),
        }
    }

    fn field<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, VocabFileError> {
        let line = self
            .next()
            .ok_or_else(|| self.malformed(format!("expected {key:?}, found end of file")))?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.malformed(format!("expected {key:?}, found {line:?}")))?;
        value
            .parse()
            .map_err(|_| self.malformed(format!("bad value {value:?} for {key:?}")))
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.inner
            .clone()
            .next()
            .and_then(|(_, l)| l.split(' ').next())
    }
}

pub fn parse_vocab(text: &str) -> Result<Vocabulary, VocabFileError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let header = lines.next().unwrap_or("");
    if header != format!("{MAGIC} {FORMAT_VERSION}") {
        return Err(VocabFileError::FormatVersionUnsupported(header.to_owned()));
    }

    let pretokenizer = PreTokenizerConfig {
        split_digits: lines.field("split_digits")?,
        attach_leading_space: lines.field("attach_leading_space")?,
    };
    let max_token_length: usize = lines.field("max_token_length")?;
    let metadata = if lines.peek_key() == Some("target_vocab_size") {
        Some(TrainingMetadata {
            target_vocab_size: lines.field("target_vocab_size")?,
            min_pair_frequency: lines.field("min_pair_frequency")?,
            corpus_fingerprint: {
                let hex: String = lines.field("corpus_fingerprint")?;
                u64::from_str_radix(&hex, 16)
                    .map_err(|_| lines.malformed(format!("bad fingerprint {hex:?}")))?
            },
            corpus_documents: lines.field("corpus_documents")?,
        })
    } else {
        None
    };
    let count: usize = lines.field("tokens")?;

    let mut tokens = Vec::with_capacity(count);
    for _ in 0..count {
        let line = lines
            .next()
            .ok_or_else(|| lines.malformed(format!("expected {count} tokens, file ended")))?;
        let (id, escaped) = line
            .split_once(' ')
            .ok_or_else(|| lines.malformed(format!("expected \"<id> <piece>\", found {line:?}")))?;
        let id: TokenId = id
            .parse()
            .map_err(|_| lines.malformed(format!("bad token id {id:?}")))?;
        let piece = unescape_piece(escaped).map_err(|e| lines.malformed(e.to_string()))?;
        let token = Token::new(id, piece).map_err(|e| lines.malformed(e.to_string()))?;
        tokens.push(token);
    }
    if let Some(extra) = lines.next() {
        return Err(lines.malformed(format!("unexpected trailing line {extra:?}")));
    }

    let vocab =
        Vocabulary::from_parts(tokens, max_token_length, pretokenizer).map_err(|e| match e {
            VocabError::Invalid(v) => VocabFileError::ValidationFailed(v),
            other => lines.malformed(other.to_string()),
        })?;
    Ok(match metadata {
        Some(meta) => vocab.with_metadata(meta),
        None => vocab,
    })
}

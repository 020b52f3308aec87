//! Corpus ingestion.
//!
//! Plain sources yield one document per file. Record sources read JSON lines
//! and yield the string value of a named field from each record. Directories
//! expand to their regular, non-hidden files in name order. Invalid UTF-8 is
//! replaced with U+FFFD and tallied in [`CorpusReader::replacements`].

use std::collections::VecDeque;
use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusFormat {
    PlainText,
    Records { field: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSource {
    pub paths: Vec<PathBuf>,
    pub format: CorpusFormat,
}

impl CorpusSource {
    pub fn plain<I, P>(paths: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<PathBuf>,
    {
        Self {
            paths: paths.into_iter().map(Into::into).collect(),
            format: CorpusFormat::PlainText,
        }
    }

    pub fn records<I, P>(paths: I, field: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<PathBuf>,
    {
        Self {
            paths: paths.into_iter().map(Into::into).collect(),
            format: CorpusFormat::Records {
                field: field.into(),
            },
        }
    }

    /// The files this source reads, in document order.
    pub fn files(&self) -> Result<Vec<PathBuf>, CorpusError> {
        let mut files = Vec::new();
        for path in &self.paths {
            let io_err = |source| CorpusError::Io {
                path: path.clone(),
                source,
            };
            let meta = fs::metadata(path).map_err(io_err)?;
            if meta.is_dir() {
                let mut entries = Vec::new();
                for entry in fs::read_dir(path).map_err(io_err)? {
                    let entry = entry.map_err(io_err)?;
                    let hidden = entry.file_name().to_string_lossy().starts_with('.');
                    if !hidden && entry.file_type().map_err(io_err)?.is_file() {
                        entries.push(entry.path());
                    }
                }
                entries.sort();
                files.extend(entries);
            } else {
                files.push(path.clone());
            }
        }
        Ok(files)
    }
}

pub fn read_corpus(source: &CorpusSource) -> Result<CorpusReader, CorpusError> {
    Ok(CorpusReader {
        files: source.files()?.into(),
        format: source.format.clone(),
        current: None,
        replacements: 0,
    })
}

/// Lossy UTF-8 decoding; returns the text and the number of invalid sequences.
pub fn decode_lossy(bytes: &[u8]) -> (String, usize) {
    let mut out = String::with_capacity(bytes.len());
    let mut invalid = 0;
    for chunk in bytes.utf8_chunks() {
        out.push_str(chunk.valid());
        if !chunk.invalid().is_empty() {
            out.push(char::REPLACEMENT_CHARACTER);
            invalid += 1;
        }
    }
    (out, invalid)
}

/// Streaming document iterator over a [`CorpusSource`].
pub struct CorpusReader {
    files: VecDeque<PathBuf>,
    format: CorpusFormat,
    current: Option<(PathBuf, BufReader<File>, usize)>,
    replacements: usize,
}

impl CorpusReader {
    /// Invalid UTF-8 sequences replaced so far.
    pub fn replacements(&self) -> usize {
        self.replacements
    }

    fn next_plain(&mut self) -> Option<Result<String, CorpusError>> {
        let path = self.files.pop_front()?;
        Some(match fs::read(&path) {
            Ok(bytes) => {
                let (text, invalid) = decode_lossy(&bytes);
                self.replacements += invalid;
                Ok(text)
            }
            Err(source) => Err(CorpusError::Io { path, source }),
        })
    }

    fn next_record(&mut self, field: &str) -> Option<Result<String, CorpusError>> {
        loop {
            if self.current.is_none() {
                let path = self.files.pop_front()?;
                match File::open(&path) {
                    Ok(f) => self.current = Some((path, BufReader::new(f), 0)),
                    Err(source) => return Some(Err(CorpusError::Io { path, source })),
                }
            }
            let (path, reader, line_no) = self.current.as_mut().unwrap();
            let mut buf = Vec::new();
            match reader.read_until(b'\n', &mut buf) {
                Ok(0) => {
                    self.current = None;
                    continue;
                }
                Ok(_) => {
                    *line_no += 1;
                    let (line, invalid) = decode_lossy(&buf);
                    self.replacements += invalid;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let bad = |message: String| CorpusError::BadRecord {
                        path: path.clone(),
                        line: *line_no,
                        message,
                    };
                    let record: serde_json::Value = match serde_json::from_str(&line) {
                        Ok(v) => v,
                        Err(e) => return Some(Err(bad(e.to_string()))),
                    };
                    return Some(match record.get(field) {
                        Some(serde_json::Value::String(s)) => Ok(s.clone()),
                        Some(_) => Err(bad(format!("field {field:?} is not a string"))),
                        None => Err(bad(format!("missing field {field:?}"))),
                    });
                }
                Err(source) => {
                    let path = path.clone();
                    self.current = None;
                    return Some(Err(CorpusError::Io { path, source }));
                }
            }
        }
    }
}

impl Iterator for CorpusReader {
    type Item = Result<String, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.format.clone() {
            CorpusFormat::PlainText => self.next_plain(),
            CorpusFormat::Records { field } => self.next_record(&field),
        }
    }
}

/// Reads every document into memory.
pub fn read_all(source: &CorpusSource) -> Result<Vec<String>, CorpusError> {
    read_corpus(source)?.collect()
}

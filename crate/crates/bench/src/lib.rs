//! Shared inputs for the encoder benchmarks: the golden vocabulary and the
//! bundled mini-corpus.

use std::path::PathBuf;

use lbpe_core::io::{load_vocab, read_all, CorpusSource};
use lbpe_core::Vocabulary;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn golden_vocab() -> Vocabulary {
    load_vocab(data_dir().join("golden/vocab-2000.txt")).expect("golden vocabulary loads")
}

pub fn corpus() -> Vec<String> {
    read_all(&CorpusSource::plain([data_dir().join("mini-corpus")])).expect("mini-corpus reads")
}

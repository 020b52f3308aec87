//! Vocabulary persistence and corpus ingestion.

mod corpus;
mod escape;
mod vocab_file;

pub use corpus::{
    decode_lossy, read_all, read_corpus, CorpusError, CorpusFormat, CorpusReader, CorpusSource,
};
pub use escape::{escape_piece, unescape_piece, UnescapeError};
pub use vocab_file::{
    load_vocab, parse_vocab, save_vocab, vocab_to_string, VocabFileError, FORMAT_VERSION,
};

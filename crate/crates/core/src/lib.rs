//! BPE vocabulary training with two encoders over the same vocabulary:
//! rank-first BPE, which merges the lowest-ranked adjacent pair first, and
//! long-token-first LBPE, which marks the longest vocabulary spans first.
//!
//! ```
//! use lbpe_core::{encode_text, decode, train, EncodeMode, TrainerConfig};
//!
//! let config = TrainerConfig { target_vocab_size: 40, ..TrainerConfig::default() };
//! let vocab = train(["the cat sat on the mat with the hat"], &config).unwrap();
//! let encoding = encode_text(" the hat", &vocab, EncodeMode::LbpeLongestFirst);
//! assert_eq!(decode(&encoding, &vocab).unwrap(), " the hat");
//! ```

pub mod encode;
pub mod io;
pub mod metrics;
pub mod pretokenize;
pub mod train;
pub mod vocab;

pub use encode::{
    decode, encode_bpe, encode_lbpe, encode_text, encode_units, DecodeError, EncodeMode,
};
pub use metrics::{
    compare_encoders, compression_rate, length_distribution, Comparison, LengthHistogram,
};
pub use pretokenize::{pretokenize, CharClass, PreToken, PreTokenizerConfig};
pub use train::{train, train_with_trace, TrainError, TrainerConfig};
pub use vocab::{Encoding, Token, TokenId, UnitSequence, Violation, VocabError, Vocabulary};

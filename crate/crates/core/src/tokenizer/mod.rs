//! Shared NL/PL subword tokenization.
//!
//! Text is first split into whitespace tokens (`<space*4>`, `<space*2>`,
//! `<space*1>`, tab, newline) and plain segments; plain segments are then
//! segmented by Viterbi search over a scored vocabulary. Encoding is
//! byte-faithful: decoding an encoding of text without unknown characters
//! reproduces it exactly.

mod encode;
mod pretokenize;
mod train;
mod vocab;

use std::path::PathBuf;

use thiserror::Error;

pub use encode::{decode, decode_with_source, encode, viterbi, TokenSequence};
pub use pretokenize::{pretokenize, Segment, SegmentKind};
pub use train::train_vocab;
pub use vocab::{
    escape, unescape, Special, SubwordVocabulary, NUM_SENTINELS, NUM_SPECIAL, SPECIAL_SECTION,
    VOCAB_HEADER,
};

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("invalid vocabulary: {0}")]
    InvalidVocab(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown token id {0}")]
    UnknownId(u32),
    #[error("cannot train vocabulary: {0}")]
    Training(String),
}

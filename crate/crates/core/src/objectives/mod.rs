//! Pre-training example construction.
//!
//! Span corruption ([`Task::Sclm`]) replaces random token spans with sentinel
//! tokens and asks for the spans on the target side. Translation
//! ([`Task::Ptlm`]) prompts with `"translate {A} to {B}: \n"` plus the source
//! text and predicts the whole target text. [`reference_nll`] scores an
//! example's target under a caller-supplied conditional distribution.

mod nll;
mod ptlm;
mod sclm;
mod span;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use nll::{reference_nll, LossOracle};
pub use ptlm::{
    build_ptlm, pack_and_truncate, translate_prompt, Direction, TranslationPair, REPAIR_PROMPT,
};
pub use sclm::{build_sclm, reconstruct_sclm};
pub use span::{num_noise_tokens, num_spans, sample_span_mask, SpanMask, DEFAULT_MEAN_SPAN, DEFAULT_NOISE_RATE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "SCLM")]
    Sclm,
    #[serde(rename = "PTLM")]
    Ptlm,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Sclm => "SCLM",
            Task::Ptlm => "PTLM",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleMeta {
    pub record_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<(String, String)>,
    /// Leading input tokens that truncation must keep (the prompt).
    #[serde(default)]
    pub prompt_len: usize,
    /// Trailing input tokens that truncation must keep (`<SEP>` and sentinel).
    #[serde(default)]
    pub suffix_len: usize,
    #[serde(default)]
    pub truncated_input: bool,
    #[serde(default)]
    pub truncated_target: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretrainExample {
    pub task: Task,
    pub input_ids: Vec<u32>,
    pub target_ids: Vec<u32>,
    pub corpus_id: String,
    pub meta: ExampleMeta,
}

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("sequence of length {0} is too short to corrupt (need at least 2 tokens)")]
    TooShort(usize),
    #[error("invalid span parameters: {0}")]
    InvalidParams(String),
    #[error("{0} spans exceed the available sentinel tokens")]
    TooManySpans(usize),
    #[error("span mask does not fit a sequence of {0} tokens")]
    MaskMismatch(usize),
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("record {0}: empty source or target text")]
    EmptySide(String),
    #[error("prompt and separator need {needed} tokens, more than max_len {max_len}")]
    PromptTooLong { needed: usize, max_len: usize },
    #[error("oracle returned log-probability {0} > 0")]
    PositiveLogProb(f64),
}

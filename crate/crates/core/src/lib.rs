//! Data pipeline and evaluation toolkit for NL/PL sequence-to-sequence
//! pre-training.
//!
//! * [`corpus`]: record schemas, streaming ingestion, docstring scrubbing,
//!   language identification and corpus statistics.
//! * [`tokenizer`]: whitespace-aware subword tokenization shared by text and
//!   code.
//! * [`objectives`]: span-corruption and translation example builders.
//! * [`sampler`]: corpus rebalancing and the interleaved example stream.
//! * [`codegraph`]: Python-subset parser, syntax trees and dataflow graphs.
//! * [`metrics`]: BLEU, chrF, ROUGE-L, exact match and CodeBLEU.
//! * [`pipeline`]: configuration and batch building used by the CLI.

pub mod corpus;
pub mod objectives;
pub mod rng;
pub mod tokenizer;
pub mod sampler;
pub mod codegraph;
pub mod metrics;
pub mod pipeline;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Surface metrics (BLEU-4, chrF, ROUGE-L, exact match) and CodeBLEU.
//!
//! Text metrics tokenize with [`tokenize_13a`]; code metrics use the code
//! lexer from [`crate::codegraph`]. Scores on the 0–100 scale are BLEU,
//! chrF, ROUGE-L and exact match; CodeBLEU and its components are in [0, 1].

mod bleu;
mod chrf;
mod codebleu;
mod keywords;
mod report;
mod rouge;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use bleu::{bleu4, bleu_stats, compute_bleu, corpus_bleu, sentence_bleu, tokenize_13a, BleuStats, MAX_ORDER};
pub use chrf::{chrf, chrf_stats, compute_chrf, corpus_chrf, ChrfStats, DEFAULT_BETA, DEFAULT_CHAR_ORDER};
pub use codebleu::{
    ast_counts, ast_match, codebleu, codebleu_stats, combine, compute_weighted, corpus_codebleu,
    corpus_codebleu_from_stats, dataflow_counts, dataflow_match, validate_weights, weighted_ngram_match,
    weighted_stats, CodeBleuScore, CodeBleuStats, MatchCount, WeightedStats,
};
pub use keywords::{KeywordTable, DEFAULT_KEYWORD_WEIGHT};
pub use report::{evaluate, ExampleScores, Metric, MetricReport};
pub use rouge::{lcs_len, rouge_l, DEFAULT_ROUGE_BETA2};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("no hypotheses to score")]
    Empty,
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("CodeBLEU weights {0:?} must be non-negative and sum to 1")]
    InvalidWeights([f64; 4]),
    #[error("no keyword table or grammar for language {0:?}")]
    UnknownLanguage(String),
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("invalid metric config: {0}")]
    InvalidConfig(String),
}

/// Tokenization and smoothing choices that are fixed in code but still go
/// into the config digest.
const SCHEME: &str = "bleu=13a,exp,effective-order;chrf=char,no-whitespace;code=lexer";

/// Tunable metric parameters. Every field is part of the report digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    pub keyword_weight: f64,
    /// ngram, weighted ngram, AST, dataflow.
    pub codebleu_weights: [f64; 4],
    pub rouge_beta2: f64,
    pub chrf_order: usize,
    pub chrf_beta: f64,
    pub min_subtree_height: usize,
    pub code_language: String,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            keyword_weight: DEFAULT_KEYWORD_WEIGHT,
            codebleu_weights: [0.25; 4],
            rouge_beta2: DEFAULT_ROUGE_BETA2,
            chrf_order: DEFAULT_CHAR_ORDER,
            chrf_beta: DEFAULT_BETA,
            min_subtree_height: crate::codegraph::DEFAULT_MIN_HEIGHT,
            code_language: "python".into(),
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        validate_weights(&self.codebleu_weights)?;
        let bad = |m: &str| Err(MetricError::InvalidConfig(m.into()));
        if !(self.keyword_weight.is_finite() && self.keyword_weight > 0.0) {
            return bad("keyword_weight must be positive");
        }
        if !(self.rouge_beta2.is_finite() && self.rouge_beta2 > 0.0) {
            return bad("rouge_beta2 must be positive");
        }
        if self.chrf_order == 0 || !(self.chrf_beta.is_finite() && self.chrf_beta > 0.0) {
            return bad("chrf_order and chrf_beta must be positive");
        }
        if self.min_subtree_height == 0 {
            return bad("min_subtree_height must be at least 1");
        }
        KeywordTable::default().keywords(&self.code_language)?;
        Ok(())
    }

    /// Hex SHA-256 over the serialized config and the fixed scheme.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(SCHEME.as_bytes());
        h.update(b"\n");
        h.update(serde_json::to_string(self).expect("config serializes").as_bytes());
        hex::encode(h.finalize())
    }
}

/// Percentage of pairs equal after stripping trailing whitespace.
pub fn exact_match<S: AsRef<str>>(hyps: &[S], refs: &[S]) -> Result<f64, MetricError> {
    bleu::check_lengths(hyps.len(), refs.len())?;
    if hyps.is_empty() {
        return Ok(0.0);
    }
    let hits = hyps
        .iter()
        .zip(refs)
        .filter(|(h, r)| h.as_ref().trim_end() == r.as_ref().trim_end())
        .count();
    Ok(100.0 * hits as f64 / hyps.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_arithmetic() {
        assert_eq!(exact_match(&["a", "b", "c", "d"], &["a ", "x", "y", "z"]).unwrap(), 25.0);
        assert_eq!(exact_match(&["a", "b"], &["a", "b"]).unwrap(), 100.0);
        assert_eq!(exact_match(&["a", "b"], &["c", "d"]).unwrap(), 0.0);
        assert!(exact_match(&["a"], &[]).is_err());
    }

    #[test]
    fn digest_tracks_config() {
        let a = MetricConfig::default();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.rouge_beta2 = 1.0;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_weights() {
        assert!(serde_json::from_str::<MetricConfig>(r#"{"bogus": 1}"#).is_err());
        let c: MetricConfig = serde_json::from_str(r#"{"codebleu_weights": [0.5, 0.5, 0.5, 0.5]}"#).unwrap();
        assert!(c.validate().is_err());
        assert!(MetricConfig::default().validate().is_ok());
    }
}

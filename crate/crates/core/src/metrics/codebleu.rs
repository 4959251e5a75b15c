//! CodeBLEU and its four components.
//!
//! * n-gram match: BLEU-4 over code-lexer tokens, scaled to [0, 1].
//! * weighted n-gram match: the same with keyword-bearing n-grams weighted.
//! * AST match: reference subtrees recovered by the hypothesis.
//! * dataflow match: reference def-use edges recovered by the hypothesis.
//!
//! The structure components are `None` when the reference gives nothing to
//! compare against (unparseable, or no dataflow edges); the composite then
//! renormalizes the remaining weights.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::bleu::{bleu_stats, compute_bleu, ngram_counts, BleuStats, MAX_ORDER};
use super::keywords::KeywordTable;
use super::{MetricConfig, MetricError};
use crate::codegraph::{subtree_multiset, CodeGrammar, PythonSubset};

/// Keyword-weighted n-gram counts; they add up over a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightedStats {
    pub hyp_len: usize,
    pub ref_len: usize,
    pub matched: [f64; MAX_ORDER],
    pub total: [f64; MAX_ORDER],
    /// Unweighted hypothesis n-gram counts, used for the smoothing floor.
    pub count: [usize; MAX_ORDER],
}

impl std::ops::AddAssign for WeightedStats {
    fn add_assign(&mut self, o: Self) {
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
        for n in 0..MAX_ORDER {
            self.matched[n] += o.matched[n];
            self.total[n] += o.total[n];
            self.count[n] += o.count[n];
        }
    }
}

pub fn weighted_stats<T: AsRef<str>>(
    hyp: &[T],
    reference: &[T],
    keywords: &BTreeSet<String>,
    weight: f64,
) -> WeightedStats {
    let mut st = WeightedStats {
        hyp_len: hyp.len(),
        ref_len: reference.len(),
        ..Default::default()
    };
    for n in 1..=MAX_ORDER {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        for (g, c) in &h {
            let w = if g.iter().any(|t| keywords.contains(*t)) {
                weight
            } else {
                1.0
            };
            st.total[n - 1] += *c as f64 * w;
            st.count[n - 1] += c;
            if let Some(rc) = r.get(g) {
                st.matched[n - 1] += (*c).min(*rc) as f64 * w;
            }
        }
    }
    st
}

/// Weighted BLEU in [0, 1], with the same brevity penalty, effective order
/// and exponential smoothing as [`compute_bleu`]. The smoothing floor for an
/// order without matches is `1 / (2^k * count)` on the unweighted count, so
/// it does not depend on which n-grams happen to hold keywords.
pub fn compute_weighted(st: &WeightedStats) -> f64 {
    if st.matched.iter().all(|&m| m == 0.0) {
        return 0.0;
    }
    let bp = if st.hyp_len < st.ref_len {
        (1.0 - st.ref_len as f64 / st.hyp_len as f64).exp()
    } else {
        1.0
    };
    let mut smooth = 1.0;
    let mut log_sum = 0.0;
    let mut eff = 0;
    for n in 0..MAX_ORDER {
        if st.total[n] == 0.0 {
            break;
        }
        eff = n + 1;
        let p = if st.matched[n] == 0.0 {
            smooth *= 2.0;
            1.0 / (smooth * st.count[n] as f64)
        } else {
            st.matched[n] / st.total[n]
        };
        log_sum += p.ln();
    }
    bp * (log_sum / eff as f64).exp()
}

pub fn weighted_ngram_match(hyp: &str, reference: &str, kw: &KeywordTable, lang: &str) -> Result<f64, MetricError> {
    let words = kw.keywords(lang)?;
    let g = PythonSubset;
    Ok(compute_weighted(&weighted_stats(&g.tokens(hyp), &g.tokens(reference), words, kw.weight)))
}

/// `(matched, reference total)` for a structure component; `None` when the
/// example is excluded.
pub type MatchCount = Option<(usize, usize)>;

fn multiset_overlap<K: Ord>(h: &BTreeMap<K, usize>, r: &BTreeMap<K, usize>) -> usize {
    r.iter()
        .map(|(k, rc)| h.get(k).map_or(0, |hc| (*hc).min(*rc)))
        .sum()
}

fn ratio(m: MatchCount) -> Option<f64> {
    m.map(|(a, b)| a as f64 / b as f64)
}

pub fn ast_counts(hyp: &str, reference: &str, grammar: &dyn CodeGrammar, min_height: usize) -> MatchCount {
    let r = subtree_multiset(&grammar.parse(reference).tree?, min_height);
    let total: usize = r.values().sum();
    if total == 0 {
        return None;
    }
    let matched = grammar
        .parse(hyp)
        .tree
        .map_or(0, |t| multiset_overlap(&subtree_multiset(&t, min_height), &r));
    Some((matched, total))
}

pub fn dataflow_counts(hyp: &str, reference: &str, grammar: &dyn CodeGrammar) -> MatchCount {
    let r = grammar.dataflow(&grammar.parse(reference).tree?).normalized();
    let total: usize = r.values().sum();
    if total == 0 {
        return None;
    }
    let matched = grammar
        .parse(hyp)
        .tree
        .map_or(0, |t| multiset_overlap(&grammar.dataflow(&t).normalized(), &r));
    Some((matched, total))
}

/// Share of reference subtrees (height at least `min_height`) found in the
/// hypothesis. An unparseable hypothesis scores 0; an unparseable reference
/// gives `None`.
pub fn ast_match(hyp: &str, reference: &str, min_height: usize) -> Option<f64> {
    ratio(ast_counts(hyp, reference, &PythonSubset, min_height))
}

/// Share of normalized reference dataflow edges found in the hypothesis.
/// `None` when the reference is unparseable or has no edges.
pub fn dataflow_match(hyp: &str, reference: &str) -> Option<f64> {
    ratio(dataflow_counts(hyp, reference, &PythonSubset))
}

pub fn validate_weights(weights: &[f64; 4]) -> Result<(), MetricError> {
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(MetricError::InvalidWeights(*weights));
    }
    Ok(())
}

/// Weighted sum of the present components, weights renormalized over them.
pub fn combine(components: [Option<f64>; 4], weights: &[f64; 4]) -> Result<f64, MetricError> {
    validate_weights(weights)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (c, w) in components.iter().zip(weights) {
        if let Some(c) = c {
            num += w * c;
            den += w;
        }
    }
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeBleuScore {
    pub codebleu: f64,
    pub ngram_match: f64,
    pub weighted_ngram_match: f64,
    pub ast_match: Option<f64>,
    pub dataflow_match: Option<f64>,
}

impl CodeBleuScore {
    fn from_parts(
        bleu: &BleuStats,
        weighted: &WeightedStats,
        ast: MatchCount,
        dfg: MatchCount,
        weights: &[f64; 4],
    ) -> Result<Self, MetricError> {
        let ngram_match = compute_bleu(bleu, true) / 100.0;
        let weighted_ngram_match = compute_weighted(weighted);
        let (ast_match, dataflow_match) = (ratio(ast), ratio(dfg));
        let codebleu = combine(
            [Some(ngram_match), Some(weighted_ngram_match), ast_match, dataflow_match],
            weights,
        )?;
        Ok(CodeBleuScore {
            codebleu,
            ngram_match,
            weighted_ngram_match,
            ast_match,
            dataflow_match,
        })
    }
}

/// Per-example sufficient statistics for CodeBLEU.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeBleuStats {
    pub bleu: BleuStats,
    pub weighted: WeightedStats,
    pub ast: MatchCount,
    pub dataflow: MatchCount,
}

pub(crate) fn grammar_for(lang: &str) -> Result<&'static dyn CodeGrammar, MetricError> {
    match lang.to_ascii_lowercase().as_str() {
        "python" => Ok(&PythonSubset),
        _ => Err(MetricError::UnknownLanguage(lang.to_string())),
    }
}

pub fn codebleu_stats(hyp: &str, reference: &str, config: &MetricConfig, kw: &KeywordTable) -> Result<CodeBleuStats, MetricError> {
    let grammar = grammar_for(&config.code_language)?;
    let words = kw.keywords(&config.code_language)?;
    let (h, r) = (grammar.tokens(hyp), grammar.tokens(reference));
    Ok(CodeBleuStats {
        bleu: bleu_stats(&h, &r),
        weighted: weighted_stats(&h, &r, words, kw.weight),
        ast: ast_counts(hyp, reference, grammar, config.min_subtree_height),
        dataflow: dataflow_counts(hyp, reference, grammar),
    })
}

/// CodeBLEU of one example in [0, 1].
pub fn codebleu(hyp: &str, reference: &str, config: &MetricConfig) -> Result<CodeBleuScore, MetricError> {
    validate_weights(&config.codebleu_weights)?;
    let kw = KeywordTable::with_weight(config.keyword_weight);
    let st = codebleu_stats(hyp, reference, config, &kw)?;
    CodeBleuScore::from_parts(&st.bleu, &st.weighted, st.ast, st.dataflow, &config.codebleu_weights)
}

/// Corpus CodeBLEU: every component is computed from summed statistics.
/// A structure component is absent only if every example excluded it.
pub fn corpus_codebleu_from_stats(stats: &[CodeBleuStats], weights: &[f64; 4]) -> Result<CodeBleuScore, MetricError> {
    let mut bleu = BleuStats::default();
    let mut weighted = WeightedStats::default();
    let sum = |acc: MatchCount, m: MatchCount| match (acc, m) {
        (Some((a, b)), Some((c, d))) => Some((a + c, b + d)),
        (x, None) | (None, x) => x,
    };
    let (mut ast, mut dfg) = (None, None);
    for s in stats {
        bleu += s.bleu;
        weighted += s.weighted;
        ast = sum(ast, s.ast);
        dfg = sum(dfg, s.dataflow);
    }
    CodeBleuScore::from_parts(&bleu, &weighted, ast, dfg, weights)
}

pub fn corpus_codebleu<S: AsRef<str>>(hyps: &[S], refs: &[S], config: &MetricConfig) -> Result<CodeBleuScore, MetricError> {
    super::bleu::check_lengths(hyps.len(), refs.len())?;
    if hyps.is_empty() {
        return Err(MetricError::Empty);
    }
    validate_weights(&config.codebleu_weights)?;
    let kw = KeywordTable::with_weight(config.keyword_weight);
    let stats = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| codebleu_stats(h.as_ref(), r.as_ref(), config, &kw))
        .collect::<Result<Vec<_>, _>>()?;
    corpus_codebleu_from_stats(&stats, &config.codebleu_weights)
}

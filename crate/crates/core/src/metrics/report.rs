//! Scoring a set of hypothesis/reference pairs into a [`MetricReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::bleu::{bleu_stats, compute_bleu, tokenize_13a, BleuStats};
use super::chrf::{chrf_stats, compute_chrf, ChrfStats};
use super::codebleu::{codebleu_stats, corpus_codebleu_from_stats, CodeBleuScore, CodeBleuStats};
use super::keywords::KeywordTable;
use super::rouge::rouge_l;
use super::{MetricConfig, MetricError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Bleu,
    Chrf,
    RougeL,
    Em,
    Codebleu,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Bleu, Metric::Chrf, Metric::RougeL, Metric::Em, Metric::Codebleu];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Bleu => "bleu",
            Metric::Chrf => "chrf",
            Metric::RougeL => "rouge_l",
            Metric::Em => "em",
            Metric::Codebleu => "codebleu",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bleu" | "bleu4" | "bleu-4" => Ok(Metric::Bleu),
            "chrf" => Ok(Metric::Chrf),
            "rouge_l" | "rouge-l" | "rougel" => Ok(Metric::RougeL),
            "em" | "exact_match" => Ok(Metric::Em),
            "codebleu" => Ok(Metric::Codebleu),
            _ => Err(MetricError::UnknownMetric(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleScores {
    pub index: usize,
    pub scores: BTreeMap<String, f64>,
    /// Components left out of this example's composite, e.g.
    /// `"ast_match_excluded"`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metrics: Vec<Metric>,
    pub count: usize,
    pub corpus: BTreeMap<String, f64>,
    pub per_example: Vec<ExampleScores>,
    pub config_digest: String,
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Default)]
struct ExampleStats {
    bleu: BleuStats,
    chrf: Option<ChrfStats>,
    rouge: f64,
    em: bool,
    code: Option<CodeBleuStats>,
}

fn insert_codebleu(map: &mut BTreeMap<String, f64>, s: &CodeBleuScore) {
    map.insert("codebleu".into(), s.codebleu);
    map.insert("codebleu.ngram_match".into(), s.ngram_match);
    map.insert("codebleu.weighted_ngram_match".into(), s.weighted_ngram_match);
    if let Some(v) = s.ast_match {
        map.insert("codebleu.ast_match".into(), v);
    }
    if let Some(v) = s.dataflow_match {
        map.insert("codebleu.dataflow_match".into(), v);
    }
}

fn score_one(
    hyp: &str,
    reference: &str,
    metrics: &[Metric],
    config: &MetricConfig,
    kw: &KeywordTable,
) -> Result<ExampleStats, MetricError> {
    let mut st = ExampleStats::default();
    let needs_words = metrics.iter().any(|m| matches!(m, Metric::Bleu | Metric::RougeL));
    let (h, r) = if needs_words {
        (tokenize_13a(hyp), tokenize_13a(reference))
    } else {
        (Vec::new(), Vec::new())
    };
    for m in metrics {
        match m {
            Metric::Bleu => st.bleu = bleu_stats(&h, &r),
            Metric::Chrf => st.chrf = Some(chrf_stats(hyp, reference, config.chrf_order)),
            Metric::RougeL => st.rouge = rouge_l(&h, &r, config.rouge_beta2),
            Metric::Em => st.em = hyp.trim_end() == reference.trim_end(),
            Metric::Codebleu => st.code = Some(codebleu_stats(hyp, reference, config, kw)?),
        }
    }
    Ok(st)
}

/// Scores `pairs` with `metrics`. Per-example work is split over `workers`
/// threads; results are reduced in input order, so the report does not
/// depend on the thread count.
pub fn evaluate<S: AsRef<str> + Sync>(
    pairs: &[(S, S)],
    metrics: &[Metric],
    config: &MetricConfig,
    workers: usize,
) -> Result<MetricReport, MetricError> {
    config.validate()?;
    if pairs.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut metrics = metrics.to_vec();
    metrics.sort();
    metrics.dedup();
    let kw = KeywordTable::with_weight(config.keyword_weight);
    let workers = workers.clamp(1, pairs.len());
    let chunk = pairs.len().div_ceil(workers);
    let stats: Vec<ExampleStats> = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|part| {
                let (metrics, kw) = (&metrics, &kw);
                scope.spawn(move || {
                    part.iter()
                        .map(|(h, r)| score_one(h.as_ref(), r.as_ref(), metrics, config, kw))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(pairs.len());
        for h in handles {
            out.extend(h.join().expect("scoring thread panicked")?);
        }
        Ok::<_, MetricError>(out)
    })?;

    let n = stats.len();
    let mut per_example = Vec::with_capacity(n);
    let mut corpus = BTreeMap::new();
    let mut bleu_total = BleuStats::default();
    let mut chrf_total = ChrfStats::zeros(config.chrf_order);
    let mut rouge_sum = 0.0;
    let mut em_hits = 0usize;
    let mut code_stats = Vec::new();
    for (index, st) in stats.into_iter().enumerate() {
        let mut scores = BTreeMap::new();
        let mut flags = Vec::new();
        for m in &metrics {
            match m {
                Metric::Bleu => {
                    scores.insert("bleu".into(), compute_bleu(&st.bleu, true));
                    bleu_total += st.bleu;
                }
                Metric::Chrf => {
                    let c = st.chrf.as_ref().expect("computed above");
                    scores.insert("chrf".into(), compute_chrf(c, config.chrf_beta));
                    chrf_total.add(c);
                }
                Metric::RougeL => {
                    scores.insert("rouge_l".into(), st.rouge);
                    rouge_sum += st.rouge;
                }
                Metric::Em => {
                    scores.insert("em".into(), if st.em { 100.0 } else { 0.0 });
                    em_hits += st.em as usize;
                }
                Metric::Codebleu => {
                    let c = st.code.as_ref().expect("computed above");
                    let s = corpus_codebleu_from_stats(std::slice::from_ref(c), &config.codebleu_weights)?;
                    insert_codebleu(&mut scores, &s);
                    if c.ast.is_none() {
                        flags.push("ast_match_excluded".to_string());
                    }
                    if c.dataflow.is_none() {
                        flags.push("dataflow_match_excluded".to_string());
                    }
                    code_stats.push(c.clone());
                }
            }
        }
        per_example.push(ExampleScores { index, scores, flags });
    }
    for m in &metrics {
        match m {
            Metric::Bleu => {
                corpus.insert("bleu".into(), compute_bleu(&bleu_total, true));
            }
            Metric::Chrf => {
                corpus.insert("chrf".into(), compute_chrf(&chrf_total, config.chrf_beta));
            }
            Metric::RougeL => {
                corpus.insert("rouge_l".into(), rouge_sum / n as f64);
            }
            Metric::Em => {
                corpus.insert("em".into(), 100.0 * em_hits as f64 / n as f64);
            }
            Metric::Codebleu => {
                let s = corpus_codebleu_from_stats(&code_stats, &config.codebleu_weights)?;
                insert_codebleu(&mut corpus, &s);
            }
        }
    }
    Ok(MetricReport {
        metrics,
        count: n,
        corpus,
        per_example,
        config_digest: config.digest(),
    })
}

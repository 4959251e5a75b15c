//! Corpus rebalancing and the interleaved training stream.
//!
//! Within each sampling group (modality and task) corpus probabilities
//! `p_i`, proportional to sample counts, are flattened to
//! `q_i = p_i^alpha / sum_j p_j^alpha`. A modality's plan distribution is the
//! group distributions scaled by the task mix (the span-corruption share when
//! a modality has both tasks). Draw `i` takes NL when `i` is even and PL when
//! it is odd, then picks a corpus from the modality's distribution.

mod stream;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{CorpusError, CorpusManifest, Modality};
use crate::objectives::{ObjectiveError, Task};
use crate::rng::CounterRng;

pub use stream::{CorpusStore, ExampleStream, StreamConfig, StreamCursor};

pub const DEFAULT_ALPHA: f64 = 0.3;
pub const DEFAULT_TASK_MIX: f64 = 0.5;

/// Derivation label of the per-draw generators.
const STREAM_LABEL: &str = "stream";

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("no corpora with samples for modality {0}")]
    EmptyModality(&'static str),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("corpus {corpus_id}: {source}")]
    Corpus {
        corpus_id: String,
        #[source]
        source: CorpusError,
    },
    #[error("corpus {corpus_id}: {message}")]
    Data { corpus_id: String, message: String },
    #[error("corpus {corpus_id}: {source}")]
    Objective {
        corpus_id: String,
        #[source]
        source: ObjectiveError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusWeights {
    pub alpha: f64,
    pub raw: BTreeMap<String, f64>,
    pub rescaled: BTreeMap<String, f64>,
}

/// Applies `q_i = p_i^alpha / sum_j p_j^alpha`.
pub fn rescale(raw: &BTreeMap<String, f64>, alpha: f64) -> Result<CorpusWeights, SamplerError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(SamplerError::InvalidAlpha(alpha));
    }
    if raw.values().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(SamplerError::InvalidProbabilities(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let sum: f64 = raw.values().sum();
    if sum == 0.0 {
        return Err(SamplerError::InvalidProbabilities("all probabilities are zero".into()));
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(SamplerError::InvalidProbabilities(format!(
            "probabilities sum to {sum}"
        )));
    }
    let powered: BTreeMap<&String, f64> = raw
        .iter()
        .map(|(k, p)| (k, if *p > 0.0 { p.powf(alpha) } else { 0.0 }))
        .collect();
    let z: f64 = powered.values().sum();
    // Keep q = p bit-for-bit at alpha = 1 unless p needs renormalizing.
    let rescaled = if alpha == 1.0 && (z - 1.0).abs() <= 1e-9 {
        raw.clone()
    } else {
        powered.into_iter().map(|(k, v)| (k.clone(), v / z)).collect()
    };
    Ok(CorpusWeights {
        alpha,
        raw: raw.clone(),
        rescaled,
    })
}

/// Rescaled weights from sample counts (`p_i = count_i / total`).
pub fn weights_from_counts(
    counts: &BTreeMap<String, u64>,
    alpha: f64,
) -> Result<CorpusWeights, SamplerError> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(SamplerError::InvalidProbabilities("all sample counts are zero".into()));
    }
    let raw = counts
        .iter()
        .map(|(k, c)| (k.clone(), *c as f64 / total as f64))
        .collect();
    rescale(&raw, alpha)
}

/// Rescaled weights of one modality's span-corruption and translation groups.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModalityWeights {
    pub sclm: Option<CorpusWeights>,
    pub ptlm: Option<CorpusWeights>,
}

impl ModalityWeights {
    /// Combined distribution: `task_mix` goes to span corruption and the rest
    /// to translation, or everything to whichever group exists.
    pub fn combine(&self, task_mix: f64) -> BTreeMap<String, f64> {
        let (a, b) = match (&self.sclm, &self.ptlm) {
            (Some(_), Some(_)) => (task_mix, 1.0 - task_mix),
            _ => (1.0, 1.0),
        };
        let mut out = BTreeMap::new();
        for (w, share) in [(&self.sclm, a), (&self.ptlm, b)] {
            if let Some(w) = w {
                for (k, q) in &w.rescaled {
                    out.insert(k.clone(), q * share);
                }
            }
        }
        out
    }
}

/// Group weights for both modalities from manifest sample counts. Groups
/// whose counts are all zero are left out.
pub fn manifest_weights(
    manifest: &CorpusManifest,
    alpha: f64,
) -> Result<(ModalityWeights, ModalityWeights), SamplerError> {
    let mut nl = ModalityWeights::default();
    let mut pl = ModalityWeights::default();
    for (group, counts) in manifest.counts_by_group() {
        if counts.values().all(|c| *c == 0) {
            continue;
        }
        let w = weights_from_counts(&counts, alpha)?;
        let side = match group.modality {
            Modality::Nl => &mut nl,
            Modality::Pl => &mut pl,
        };
        match group.task {
            Task::Sclm => side.sclm = Some(w),
            Task::Ptlm => side.ptlm = Some(w),
        }
    }
    Ok((nl, pl))
}

/// Stream plan; serialized as the plan file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamPlan {
    pub alpha: f64,
    pub seed: u64,
    /// Per-corpus draw probability within the NL modality.
    pub nl: BTreeMap<String, f64>,
    /// Per-corpus draw probability within the PL modality.
    pub pl: BTreeMap<String, f64>,
    pub task_mix: f64,
    pub epoch_size: u64,
}

/// One draw of the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub index: u64,
    pub modality: Modality,
    pub corpus_id: String,
}

pub fn plan_stream(
    nl: &ModalityWeights,
    pl: &ModalityWeights,
    alpha: f64,
    task_mix: f64,
    seed: u64,
    epoch_size: u64,
) -> Result<StreamPlan, SamplerError> {
    let plan = StreamPlan {
        alpha,
        seed,
        nl: nl.combine(task_mix),
        pl: pl.combine(task_mix),
        task_mix,
        epoch_size,
    };
    plan.validate()?;
    Ok(plan)
}

impl StreamPlan {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(SamplerError::InvalidAlpha(self.alpha));
        }
        if !(0.0..=1.0).contains(&self.task_mix) {
            return Err(SamplerError::InvalidPlan(format!("task_mix {}", self.task_mix)));
        }
        if self.epoch_size == 0 {
            return Err(SamplerError::InvalidPlan("epoch_size must be positive".into()));
        }
        for (name, dist) in [("NL", &self.nl), ("PL", &self.pl)] {
            if dist.values().all(|q| *q <= 0.0) {
                return Err(SamplerError::EmptyModality(name));
            }
            if dist.values().any(|q| !(q.is_finite() && *q >= 0.0)) {
                return Err(SamplerError::InvalidPlan(format!("{name}: bad probability")));
            }
            let sum: f64 = dist.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(SamplerError::InvalidPlan(format!("{name} probabilities sum to {sum}")));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SamplerError> {
        let text = fs::read_to_string(path)
            .map_err(|e| SamplerError::InvalidPlan(format!("{}: {e}", path.display())))?;
        let plan: StreamPlan =
            serde_json::from_str(&text).map_err(|e| SamplerError::InvalidPlan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plan serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the plan file contents, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn modality(index: u64) -> Modality {
        if index % 2 == 0 {
            Modality::Nl
        } else {
            Modality::Pl
        }
    }

    /// Draw `index` of the stream. Depends only on the plan and the index.
    pub fn draw(&self, index: u64) -> Draw {
        let modality = Self::modality(index);
        let dist = match modality {
            Modality::Nl => &self.nl,
            Modality::Pl => &self.pl,
        };
        let mut rng = CounterRng::new(self.seed)
            .derive_str(STREAM_LABEL)
            .derive(index);
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut chosen = None;
        for (id, q) in dist {
            if *q <= 0.0 {
                continue;
            }
            acc += q;
            chosen = Some(id);
            if u < acc {
                break;
            }
        }
        Draw {
            index,
            modality,
            corpus_id: chosen.expect("validated plan has a positive entry").clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs(values: &[(&str, f64)]) -> BTreeMap<String, f64> {
        values.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn symmetric_and_identity() {
        let w = rescale(&probs(&[("a", 0.5), ("b", 0.5)]), 0.3).unwrap();
        assert_eq!(w.rescaled["a"], 0.5);
        let p = probs(&[("a", 0.7), ("b", 0.2), ("c", 0.1)]);
        let w = rescale(&p, 1.0).unwrap();
        for (k, v) in &p {
            assert!((w.rescaled[k] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn skewed_pair() {
        let w = rescale(&probs(&[("a", 0.9), ("b", 0.1)]), 0.3).unwrap();
        assert!((w.rescaled["a"] - 0.659).abs() < 1e-3);
        assert!((w.rescaled["b"] - 0.341).abs() < 1e-3);
    }

    #[test]
    fn errors() {
        assert!(rescale(&probs(&[("a", 0.0)]), 0.3).is_err());
        assert!(rescale(&probs(&[("a", 1.0)]), 0.0).is_err());
        assert!(rescale(&probs(&[("a", 1.0)]), 1.5).is_err());
        assert!(rescale(&probs(&[("a", 0.5)]), 0.3).is_err());
    }

    #[test]
    fn zero_stays_zero() {
        let w = rescale(&probs(&[("a", 1.0), ("b", 0.0)]), 0.3).unwrap();
        assert_eq!(w.rescaled["b"], 0.0);
        assert_eq!(w.rescaled["a"], 1.0);
    }

    fn single(id: &str) -> ModalityWeights {
        ModalityWeights {
            sclm: Some(rescale(&probs(&[(id, 1.0)]), 0.3).unwrap()),
            ptlm: None,
        }
    }

    #[test]
    fn alternation() {
        let plan = plan_stream(&single("nl"), &single("pl"), 0.3, 0.5, 1, 10).unwrap();
        let draws: Vec<String> = (0..10).map(|i| plan.draw(i).corpus_id).collect();
        assert_eq!(draws.iter().filter(|d| *d == "nl").count(), 5);
        for (i, d) in draws.iter().enumerate() {
            assert_eq!(d, if i % 2 == 0 { "nl" } else { "pl" });
        }
    }

    #[test]
    fn empty_modality() {
        assert!(matches!(
            plan_stream(&single("nl"), &ModalityWeights::default(), 0.3, 0.5, 1, 10),
            Err(SamplerError::EmptyModality("PL"))
        ));
    }

    #[test]
    fn task_mix_splits_modality() {
        let both = ModalityWeights {
            sclm: Some(rescale(&probs(&[("mono", 1.0)]), 0.3).unwrap()),
            ptlm: Some(rescale(&probs(&[("par_a", 0.5), ("par_b", 0.5)]), 0.3).unwrap()),
        };
        let combined = both.combine(0.5);
        assert_eq!(combined["mono"], 0.5);
        assert_eq!(combined["par_a"], 0.25);
    }

    #[test]
    fn plan_file_round_trip() {
        let plan = plan_stream(&single("nl"), &single("pl"), 0.3, 0.5, 7, 4).unwrap();
        let back: StreamPlan = serde_json::from_str(&plan.to_json()).unwrap();
        assert_eq!(plan, back);
    }
}

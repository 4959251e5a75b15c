//! Character-trigram Naive Bayes language identification.
//!
//! Text is lowercased, whitespace runs are collapsed to one space and the
//! result is padded with a space on each side before trigrams are taken over
//! Unicode scalar values. Each profile uses add-one smoothing over a trigram
//! inventory shared by every profile in the set, so a profile's observed
//! trigrams plus the smoothing mass of unseen ones sum to exactly one.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use super::CorpusError;

#[derive(Debug, Clone, PartialEq)]
pub struct LangProfile {
    pub lang: String,
    pub trigram_logprobs: HashMap<String, f64>,
    /// Log probability of any trigram not observed in training.
    pub unseen_logprob: f64,
    pub prior: f64,
}

/// Normalized text used for trigram extraction.
pub fn normalize(text: &str) -> String {
    let lowered = text.to_lowercase();
    let mut out = String::with_capacity(lowered.len() + 2);
    out.push(' ');
    for (i, word) in lowered.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
    }
    out.push(' ');
    out
}

pub fn trigrams(text: &str) -> Vec<String> {
    let chars: Vec<char> = normalize(text).chars().collect();
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

impl LangProfile {
    /// Trains one profile per `(lang, text)` sample with uniform priors.
    pub fn train_set(samples: &[(&str, &str)]) -> Vec<LangProfile> {
        let counts: Vec<HashMap<String, u64>> = samples
            .iter()
            .map(|(_, text)| {
                let mut c = HashMap::new();
                for t in trigrams(text) {
                    *c.entry(t).or_insert(0) += 1;
                }
                c
            })
            .collect();
        let inventory: BTreeSet<&String> = counts.iter().flat_map(|c| c.keys()).collect();
        // One extra type stands for every trigram outside the inventory.
        let types = inventory.len() as f64 + 1.0;
        let prior = 1.0 / samples.len() as f64;
        samples
            .iter()
            .zip(&counts)
            .map(|((lang, _), c)| {
                let total: u64 = c.values().sum();
                let denom = total as f64 + types;
                LangProfile {
                    lang: (*lang).to_string(),
                    trigram_logprobs: c
                        .iter()
                        .map(|(t, n)| (t.clone(), ((*n as f64 + 1.0) / denom).ln()))
                        .collect(),
                    unseen_logprob: (1.0 / denom).ln(),
                    prior,
                }
            })
            .collect()
    }

    fn log_likelihood(&self, grams: &[String]) -> f64 {
        grams
            .iter()
            .map(|g| {
                self.trigram_logprobs
                    .get(g)
                    .copied()
                    .unwrap_or(self.unseen_logprob)
            })
            .sum()
    }
}

macro_rules! bundled {
    ($($lang:literal),* $(,)?) => {
        &[$(($lang, include_str!(concat!("../../data/langid/", $lang, ".txt")))),*]
    };
}

/// Training text for the bundled profiles.
pub const BUNDLED_SAMPLES: &[(&str, &str)] = bundled!(
    "ar", "bg", "de", "el", "en", "es", "fr", "hi", "ru", "sw", "th", "tr", "ur", "vi", "zh",
);

/// Profiles for the languages of the parallel-text corpora.
pub fn bundled_profiles() -> &'static [LangProfile] {
    static PROFILES: OnceLock<Vec<LangProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| LangProfile::train_set(BUNDLED_SAMPLES))
}

/// Posterior over all profiles, in profile order. Sums to one.
pub fn posteriors(text: &str, profiles: &[LangProfile]) -> Result<Vec<f64>, CorpusError> {
    if profiles.is_empty() {
        return Err(CorpusError::InvalidInput("no language profiles".into()));
    }
    if text.trim().is_empty() {
        return Err(CorpusError::InvalidInput("empty text".into()));
    }
    let grams = trigrams(text);
    let scores: Vec<f64> = profiles
        .iter()
        .map(|p| p.prior.ln() + p.log_likelihood(&grams))
        .collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exp.iter().sum();
    Ok(exp.into_iter().map(|e| e / z).collect())
}

/// Most probable language and its posterior. Ties go to the earlier profile.
pub fn identify_lang(text: &str, profiles: &[LangProfile]) -> Result<(String, f64), CorpusError> {
    let post = posteriors(text, profiles)?;
    let mut best = 0;
    for (i, p) in post.iter().enumerate() {
        if *p > post[best] {
            best = i;
        }
    }
    Ok((profiles[best].lang.clone(), post[best]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_pads_and_collapses() {
        assert_eq!(normalize("  Hello\t\nWORLD "), " hello world ");
        assert_eq!(trigrams("a"), vec![" a ".to_string()]);
    }

    #[test]
    fn profiles_are_normalized() {
        let profiles = bundled_profiles();
        // Inventory size is shared: observed mass + unseen mass must be one.
        let inventory: BTreeSet<&String> = profiles
            .iter()
            .flat_map(|p| p.trigram_logprobs.keys())
            .collect();
        for p in profiles {
            let observed: f64 = p.trigram_logprobs.values().map(|l| l.exp()).sum();
            let unseen_types = (inventory.len() + 1 - p.trigram_logprobs.len()) as f64;
            let total = observed + unseen_types * p.unseen_logprob.exp();
            assert!((total - 1.0).abs() < 1e-9, "{}: {total}", p.lang);
        }
    }

    #[test]
    fn each_training_sample_identifies_itself() {
        let profiles = bundled_profiles();
        for (lang, text) in BUNDLED_SAMPLES {
            let (got, conf) = identify_lang(text, profiles).unwrap();
            assert_eq!(&got, lang);
            assert!(conf > 0.99);
        }
    }

    #[test]
    fn empty_text_rejected() {
        assert!(identify_lang("   ", bundled_profiles()).is_err());
        assert!(identify_lang("hello", &[]).is_err());
    }

    #[test]
    fn posteriors_sum_to_one() {
        for text in ["a", "hello there", "привет", "x = f(y)"] {
            let p = posteriors(text, bundled_profiles()).unwrap();
            let s: f64 = p.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

//! Character n-gram F-score (chrF) matching sacreBLEU's default variant:
//! whitespace is removed before n-grams are taken, precision and recall are
//! averaged over the orders present on both sides, then combined.

use std::collections::HashMap;

pub const DEFAULT_CHAR_ORDER: usize = 6;
pub const DEFAULT_BETA: f64 = 2.0;

/// Per-order `[hyp, ref, match]` counts; they add up over a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChrfStats {
    pub counts: Vec<[usize; 3]>,
}

impl ChrfStats {
    pub fn zeros(order: usize) -> Self {
        ChrfStats {
            counts: vec![[0; 3]; order],
        }
    }

    pub fn add(&mut self, o: &ChrfStats) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
    }
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], usize> {
    let mut out = HashMap::new();
    if chars.len() >= n {
        for w in chars.windows(n) {
            *out.entry(w).or_insert(0) += 1;
        }
    }
    out
}

pub fn chrf_stats(hyp: &str, reference: &str, order: usize) -> ChrfStats {
    let h: Vec<char> = hyp.split_whitespace().flat_map(str::chars).collect();
    let r: Vec<char> = reference.split_whitespace().flat_map(str::chars).collect();
    let mut st = ChrfStats::zeros(order);
    for n in 1..=order {
        let hg = char_ngrams(&h, n);
        let rg = char_ngrams(&r, n);
        let hyp_count: usize = hg.values().sum();
        let ref_count: usize = rg.values().sum();
        let matched: usize = hg
            .iter()
            .filter_map(|(g, c)| rg.get(g).map(|rc| (*c).min(*rc)))
            .sum();
        // No hypothesis credit for an order the reference lacks.
        st.counts[n - 1] = [if rg.is_empty() { 0 } else { hyp_count }, ref_count, matched];
    }
    st
}

/// chrF in [0, 100] from statistics.
pub fn compute_chrf(st: &ChrfStats, beta: f64) -> f64 {
    let factor = beta * beta;
    let (mut p, mut r, mut eff) = (0.0, 0.0, 0usize);
    for &[h, rf, m] in &st.counts {
        if h > 0 && rf > 0 {
            p += m as f64 / h as f64;
            r += m as f64 / rf as f64;
            eff += 1;
        }
    }
    if eff == 0 {
        return 0.0;
    }
    p /= eff as f64;
    r /= eff as f64;
    if p + r == 0.0 {
        return 0.0;
    }
    100.0 * (1.0 + factor) * p * r / (factor * p + r)
}

/// Sentence chrF. Empty input on either side scores 0 with a warning.
pub fn chrf(hyp: &str, reference: &str, order: usize, beta: f64) -> f64 {
    if hyp.trim().is_empty() || reference.trim().is_empty() {
        log::warn!("chrF on empty input, scoring 0");
        return 0.0;
    }
    compute_chrf(&chrf_stats(hyp, reference, order), beta)
}

/// Corpus chrF from summed statistics.
pub fn corpus_chrf<S: AsRef<str>>(hyps: &[S], refs: &[S], order: usize, beta: f64) -> f64 {
    let mut st = ChrfStats::zeros(order);
    for (h, r) in hyps.iter().zip(refs) {
        st.add(&chrf_stats(h.as_ref(), r.as_ref(), order));
    }
    compute_chrf(&st, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_disjoint_empty() {
        assert!((chrf("the cat", "the cat", 6, 2.0) - 100.0).abs() < 1e-9);
        assert_eq!(chrf("abc", "xyz", 6, 2.0), 0.0);
        assert_eq!(chrf("", "xyz", 6, 2.0), 0.0);
    }

    #[test]
    fn whitespace_ignored() {
        let a = chrf("a b c", "abc", 6, 2.0);
        assert!((a - 100.0).abs() < 1e-9);
    }

    #[test]
    fn abcd_vs_abce_by_hand() {
        // Orders 1..4 exist on both sides: precisions 3/4, 2/3, 1/2, 0/1.
        let p = (0.75 + 2.0 / 3.0 + 0.5 + 0.0) / 4.0;
        let f = 100.0 * 5.0 * p * p / (4.0 * p + p);
        assert!((chrf("abcd", "abce", 6, 2.0) - f).abs() < 1e-12);
    }
}

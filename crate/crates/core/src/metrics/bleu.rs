//! Corpus and sentence BLEU with sacreBLEU-compatible statistics and
//! exponential smoothing.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;

use super::MetricError;

pub const MAX_ORDER: usize = 4;

/// Applies the mteval-v13a tokenization and returns the tokens.
///
/// The steps, in order: drop `<skipped>`, join `-\n` hyphenations, turn
/// newlines into spaces, unescape `&quot; &amp; &lt; &gt;`, pad ASCII
/// punctuation and symbols (except `'`, `-`, `.` and `,`) with spaces, split
/// `.` and `,` unless both neighbours are digits, split `-` after a digit,
/// then split on whitespace.
pub fn tokenize_13a(line: &str) -> Vec<String> {
    static RULES: OnceLock<[(Regex, &'static str); 4]> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        [
            (Regex::new(r"([\{-~\[-`\x20-&\(-\+:-@/])").unwrap(), " $1 "),
            (Regex::new(r"([^0-9])([\.,])").unwrap(), "$1 $2 "),
            (Regex::new(r"([\.,])([^0-9])").unwrap(), " $1 $2"),
            (Regex::new(r"([0-9])(-)").unwrap(), "$1 $2 "),
        ]
    });
    let mut s = line.trim_end().replace("<skipped>", "");
    s = s.replace("-\n", "").replace('\n', " ");
    if s.contains('&') {
        s = s
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut s = format!(" {s} ");
    for (re, rep) in rules {
        s = re.replace_all(&s, *rep).into_owned();
    }
    s.split_whitespace().map(str::to_string).collect()
}

/// Sufficient statistics for BLEU; they add up over a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub hyp_len: usize,
    pub ref_len: usize,
    pub correct: [usize; MAX_ORDER],
    pub total: [usize; MAX_ORDER],
}

impl std::ops::AddAssign for BleuStats {
    fn add_assign(&mut self, o: Self) {
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
        for n in 0..MAX_ORDER {
            self.correct[n] += o.correct[n];
            self.total[n] += o.total[n];
        }
    }
}

pub(crate) fn ngram_counts<T: AsRef<str>>(tokens: &[T], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut out = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *out.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    out
}

pub fn bleu_stats<T: AsRef<str>>(hyp: &[T], reference: &[T]) -> BleuStats {
    let mut st = BleuStats {
        hyp_len: hyp.len(),
        ref_len: reference.len(),
        ..Default::default()
    };
    for n in 1..=MAX_ORDER {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        for (g, c) in &h {
            st.total[n - 1] += c;
            if let Some(rc) = r.get(g) {
                st.correct[n - 1] += (*c).min(*rc);
            }
        }
    }
    st
}

fn my_log(x: f64) -> f64 {
    if x == 0.0 {
        -9_999_999_999.0
    } else {
        x.ln()
    }
}

/// BLEU in [0, 100] from statistics.
///
/// With `effective_order` the geometric mean runs only over the orders for
/// which the hypothesis has n-grams. Orders with no match get the mteval
/// exponential smoothing `1 / (2^k * total)`.
pub fn compute_bleu(st: &BleuStats, effective_order: bool) -> f64 {
    let bp = if st.hyp_len < st.ref_len {
        if st.hyp_len > 0 {
            (1.0 - st.ref_len as f64 / st.hyp_len as f64).exp()
        } else {
            0.0
        }
    } else {
        1.0
    };
    if st.correct.iter().all(|&c| c == 0) {
        return 0.0;
    }
    let mut precisions = [0.0f64; MAX_ORDER];
    let mut smooth = 1.0;
    let mut eff = MAX_ORDER;
    for n in 1..=MAX_ORDER {
        if st.total[n - 1] == 0 {
            break;
        }
        if effective_order {
            eff = n;
        }
        precisions[n - 1] = if st.correct[n - 1] == 0 {
            smooth *= 2.0;
            100.0 / (smooth * st.total[n - 1] as f64)
        } else {
            100.0 * st.correct[n - 1] as f64 / st.total[n - 1] as f64
        };
    }
    let sum: f64 = precisions[..eff].iter().map(|&p| my_log(p)).sum();
    bp * (sum / eff as f64).exp()
}

/// Corpus BLEU-4 over pre-tokenized segments.
///
/// Uses effective order, which only differs from plain corpus BLEU when the
/// whole hypothesis side has no n-grams of some order.
pub fn bleu4<T: AsRef<str>>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<f64, MetricError> {
    check_lengths(hyps.len(), refs.len())?;
    if hyps.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut st = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        st += bleu_stats(h, r);
    }
    Ok(compute_bleu(&st, true))
}

/// Corpus BLEU-4 over raw text with 13a tokenization.
pub fn corpus_bleu<S: AsRef<str>>(hyps: &[S], refs: &[S]) -> Result<f64, MetricError> {
    let h: Vec<Vec<String>> = hyps.iter().map(|s| tokenize_13a(s.as_ref())).collect();
    let r: Vec<Vec<String>> = refs.iter().map(|s| tokenize_13a(s.as_ref())).collect();
    bleu4(&h, &r)
}

/// Sentence BLEU over raw text with 13a tokenization and effective order.
pub fn sentence_bleu(hyp: &str, reference: &str) -> f64 {
    compute_bleu(&bleu_stats(&tokenize_13a(hyp), &tokenize_13a(reference)), true)
}

pub(crate) fn check_lengths(h: usize, r: usize) -> Result<(), MetricError> {
    if h != r {
        return Err(MetricError::LengthMismatch { hyps: h, refs: r });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_13a_cases() {
        assert_eq!(tokenize_13a("Hello, world!"), vec!["Hello", ",", "world", "!"]);
        assert_eq!(tokenize_13a("3.14 and 1,000"), vec!["3.14", "and", "1,000"]);
        assert_eq!(tokenize_13a("end."), vec!["end", "."]);
        assert_eq!(tokenize_13a("a &amp; b"), vec!["a", "&", "b"]);
        assert_eq!(tokenize_13a("1-2 x-y"), vec!["1", "-", "2", "x-y"]);
        assert_eq!(tokenize_13a("don't (x)"), vec!["don't", "(", "x", ")"]);
    }

    #[test]
    fn identity_and_disjoint() {
        assert!((sentence_bleu("a b c d e", "a b c d e") - 100.0).abs() < 1e-9);
        assert!((sentence_bleu("a b", "a b") - 100.0).abs() < 1e-9);
        assert_eq!(sentence_bleu("x y z", "a b c"), 0.0);
        assert_eq!(sentence_bleu("", "a b c"), 0.0);
    }

    #[test]
    fn errors() {
        let e: Vec<Vec<String>> = vec![];
        assert!(matches!(bleu4(&e, &e), Err(MetricError::Empty)));
        assert!(corpus_bleu(&["a"], &["a", "b"]).is_err());
    }

    #[test]
    fn stats_add_up() {
        let a = bleu_stats(&["a", "b", "c"], &["a", "b", "d"]);
        assert_eq!(a.correct, [2, 1, 0, 0]);
        assert_eq!(a.total, [3, 2, 1, 0]);
    }
}

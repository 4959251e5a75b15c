//! ROUGE-L over token sequences.

pub const DEFAULT_ROUGE_BETA2: f64 = 1.2;

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS F-measure in [0, 100]: `(1 + b2) P R / (R + b2 P)` with
/// `P = lcs / |hyp|` and `R = lcs / |ref|`.
pub fn rouge_l<T: PartialEq>(hyp: &[T], reference: &[T], beta2: f64) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        log::warn!("ROUGE-L on empty input, scoring 0");
        return 0.0;
    }
    let l = lcs_len(hyp, reference);
    if l == 0 {
        return 0.0;
    }
    let p = l as f64 / hyp.len() as f64;
    let r = l as f64 / reference.len() as f64;
    100.0 * ((1.0 + beta2) * p * r / (r + beta2 * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed() {
        let h = ["a", "b", "c", "d"];
        let r = ["a", "c", "d"];
        assert_eq!(lcs_len(&h, &r), 3);
        let (p, rc) = (0.75, 1.0);
        let f = 100.0 * 2.2 * p * rc / (rc + 1.2 * p);
        assert!((rouge_l(&h, &r, 1.2) - f).abs() < 1e-12);
    }

    #[test]
    fn extremes() {
        assert_eq!(rouge_l(&["a", "b"], &["a", "b"], 1.2), 100.0);
        assert_eq!(rouge_l(&["a"], &["b"], 1.2), 0.0);
        let e: [&str; 0] = [];
        assert_eq!(rouge_l(&e, &["b"], 1.2), 0.0);
    }
}

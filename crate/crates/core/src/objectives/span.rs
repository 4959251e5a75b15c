//! Random span masks.
//!
//! For a sequence of `n` tokens the mask covers
//! `num_noise = min(n - 1, max(1, round(rate * n)))` tokens split into
//! `num_spans = max(1, round(num_noise / mean_span))` spans (`round` is
//! half away from zero), capped at the number of sentinel tokens. Noise tokens are split by a uniform random
//! composition into `num_spans` positive parts, then the `n - num_noise`
//! kept tokens are split into `num_spans + 1` parts of which only the first
//! and last may be empty. Parts interleave as kept, noise, kept, ..., noise,
//! kept.
//!
//! A uniform composition of `m` into `k` positive parts draws `k - 1`
//! distinct cut points from `1..m` with a partial forward Fisher-Yates pass
//! over `[1, 2, ..., m - 1]` (`swap(i, i + below(len - i))` for
//! `i < k - 1`), sorts them, and takes successive differences of
//! `0, cuts..., m`. The noise composition is drawn first. The kept-token
//! composition is drawn for `m = kept + 2` and one is then taken off the
//! first and last part.

use crate::rng::CounterRng;
use crate::tokenizer::NUM_SENTINELS;

use super::ObjectiveError;

pub const DEFAULT_NOISE_RATE: f64 = 0.15;
pub const DEFAULT_MEAN_SPAN: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanMask {
    /// `(start, length)` pairs, sorted and non-overlapping.
    pub spans: Vec<(usize, usize)>,
    pub noise_rate: f64,
    pub mean_span: f64,
}

impl SpanMask {
    pub fn empty(noise_rate: f64, mean_span: f64) -> Self {
        Self {
            spans: Vec::new(),
            noise_rate,
            mean_span,
        }
    }

    pub fn noise_tokens(&self) -> usize {
        self.spans.iter().map(|(_, l)| l).sum()
    }

    /// Checks that spans are sorted, disjoint, non-empty and within `n`.
    pub fn fits(&self, n: usize) -> bool {
        let mut end = 0;
        for (i, &(start, len)) in self.spans.iter().enumerate() {
            if len == 0 || (i > 0 && start < end) || start + len > n {
                return false;
            }
            end = start + len;
        }
        true
    }
}

pub fn num_noise_tokens(n: usize, rate: f64) -> usize {
    let wanted = (rate * n as f64).round() as usize;
    wanted.max(1).min(n - 1)
}

pub fn num_spans(num_noise: usize, mean_span: f64) -> usize {
    ((num_noise as f64 / mean_span).round() as usize).max(1)
}

pub fn sample_span_mask(
    n: usize,
    rate: f64,
    mean_span: f64,
    rng: &mut CounterRng,
) -> Result<SpanMask, ObjectiveError> {
    if n < 2 {
        return Err(ObjectiveError::TooShort(n));
    }
    if !(0.0..1.0).contains(&rate) {
        return Err(ObjectiveError::InvalidParams(format!("noise rate {rate}")));
    }
    if !(mean_span >= 1.0) {
        return Err(ObjectiveError::InvalidParams(format!("mean span {mean_span}")));
    }
    if rate == 0.0 {
        return Ok(SpanMask::empty(rate, mean_span));
    }
    let noise = num_noise_tokens(n, rate);
    let kept = n - noise;
    // Interior kept parts must be non-empty, which caps the span count.
    let spans_wanted = num_spans(noise, mean_span).min(kept + 1).min(NUM_SENTINELS);
    let noise_parts = composition(noise, spans_wanted, rng);
    let mut kept_parts = composition(kept + 2, spans_wanted + 1, rng);
    kept_parts[0] -= 1;
    *kept_parts.last_mut().expect("at least two parts") -= 1;

    let mut spans = Vec::with_capacity(spans_wanted);
    let mut pos = 0;
    for (k, len) in kept_parts.iter().zip(&noise_parts) {
        pos += k;
        spans.push((pos, *len));
        pos += len;
    }
    Ok(SpanMask {
        spans,
        noise_rate: rate,
        mean_span,
    })
}

/// Uniform composition of `m` into `k` positive parts (`1 <= k <= m`).
fn composition(m: usize, k: usize, rng: &mut CounterRng) -> Vec<usize> {
    debug_assert!(k >= 1 && k <= m);
    let mut points: Vec<usize> = (1..m).collect();
    let len = points.len();
    for i in 0..k - 1 {
        let j = i + rng.below((len - i) as u64) as usize;
        points.swap(i, j);
    }
    let mut cuts = points[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(m)) {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_twenty_tokens() {
        assert_eq!(num_noise_tokens(20, 0.15), 3);
        assert_eq!(num_spans(3, 3.0), 1);
        let mask = sample_span_mask(20, 0.15, 3.0, &mut CounterRng::new(0)).unwrap();
        assert_eq!(mask.spans.len(), 1);
        assert_eq!(mask.noise_tokens(), 3);
    }

    #[test]
    fn zero_rate_is_empty() {
        let mask = sample_span_mask(50, 0.0, 3.0, &mut CounterRng::new(0)).unwrap();
        assert!(mask.spans.is_empty());
    }

    #[test]
    fn too_short() {
        assert_eq!(
            sample_span_mask(1, 0.15, 3.0, &mut CounterRng::new(0)),
            Err(ObjectiveError::TooShort(1))
        );
    }

    #[test]
    fn two_tokens() {
        for seed in 0..20 {
            let mask = sample_span_mask(2, 0.15, 3.0, &mut CounterRng::new(seed)).unwrap();
            assert_eq!(mask.noise_tokens(), 1);
            assert!(mask.fits(2));
        }
    }

    #[test]
    fn compositions_are_positive() {
        let mut rng = CounterRng::new(9);
        for m in 1..30 {
            for k in 1..=m {
                let parts = composition(m, k, &mut rng);
                assert_eq!(parts.len(), k);
                assert_eq!(parts.iter().sum::<usize>(), m);
                assert!(parts.iter().all(|p| *p > 0));
            }
        }
    }
}

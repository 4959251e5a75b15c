//! Splittable counter-based random number generation.
//!
//! Every random decision in the pipeline (span masks, scrubbing coins, corpus
//! draws, shuffles) is taken from a [`CounterRng`]. The algorithm is fixed so
//! that golden values stay identical across platforms and releases:
//!
//! * `mix64` is the SplitMix64 finalizer.
//! * The `i`-th output (1-based) of a generator with key `k` is
//!   `mix64(k + i * 0x9E3779B97F4A7C15)` (wrapping arithmetic), i.e. the
//!   SplitMix64 stream seeded with `k`.
//! * `derive(label)` returns a fresh generator keyed by
//!   `mix64(k ^ mix64(label + 0x9E3779B97F4A7C15))`; it depends only on the
//!   parent key, never on how many values the parent has produced.
//! * `next_f64` takes the top 53 bits: `(x >> 11) * 2^-53`, in `[0, 1)`.
//! * `below(n)` draws by rejection: values `x >= (u64::MAX / n) * n` are
//!   discarded, otherwise `x % n` is returned.
//! * `shuffle` is the forward Fisher-Yates variant: for `i` in `0..len-1`,
//!   swap `i` with `i + below(len - i)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a, used to turn record and corpus ids into derivation labels.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { key: seed, counter: 0 }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Child generator for `label`. Pure in `(key, label)`.
    pub fn derive(&self, label: u64) -> Self {
        Self::new(mix64(self.key ^ mix64(label.wrapping_add(GOLDEN))))
    }

    /// Child generator for a string label (hashed with FNV-1a).
    pub fn derive_str(&self, label: &str) -> Self {
        self.derive(fnv1a(label.as_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        let len = items.len();
        if len < 2 {
            return;
        }
        for i in 0..len - 1 {
            let j = i + self.below((len - i) as u64) as usize;
            items.swap(i, j);
        }
    }
}

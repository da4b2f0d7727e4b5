//! Deterministic pseudo-random generator used by every randomized step.
//!
//! The generator is splitmix64 (Vigna, 2015), chosen because the whole
//! recipe fits in a few lines and reproduces bit-exactly in any language.
//! The full recipe, so other implementations can match this one:
//!
//! State: one 64-bit unsigned integer, initialized to the seed.
//!
//! `next_u64`:
//! ```text
//! state = (state + 0x9E3779B97F4A7C15) mod 2^64
//! z = state
//! z = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
//! z = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
//! return z XOR (z >> 31)
//! ```
//!
//! `next_f64` (uniform in `[0, 1)`): take the top 53 bits,
//! `(next_u64() >> 11) * 2^-53`.
//!
//! `next_below(n)` (uniform integer in `[0, n)`, unbiased): rejection
//! sampling with threshold `t = (2^64 - n) mod n`; draw `x = next_u64()`
//! until `x >= t`, then return `x mod n`.
//!
//! `shuffle` (Fisher-Yates): for `i` from `len-1` down to `1`, draw
//! `j = next_below(i + 1)` and swap elements `i` and `j`.
//!
//! `next_gaussian` (standard normal, Box-Muller cosine branch, no caching):
//! `u1 = 1 - next_f64()` (in `(0, 1]`), `u2 = next_f64()`,
//! `z = sqrt(-2 ln u1) * cos(2 pi u2)`.

/// Seeded deterministic generator. Identical seeds produce identical
/// streams on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform float in `[0, 1)` from the top 53 bits of `next_u64`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, n)`.
    ///
    /// Panics if `n == 0`.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// In-place Fisher-Yates shuffle (high index down to 1).
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// `k` distinct indices sampled uniformly without replacement from
    /// `0..n`: a full Fisher-Yates shuffle of `0..n` truncated to its
    /// first `k` entries.
    ///
    /// Panics if `k > n`.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot sample {k} of {n} without replacement");
        let mut all: Vec<usize> = (0..n).collect();
        self.shuffle(&mut all);
        all.truncate(k);
        all
    }

    /// Standard normal draw (Box-Muller cosine branch).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

//! Deterministic random numbers for sampling and Monte Carlo validation.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood): output j of a stream
//! seeded with `s` is `mix(s + (j+1)·0x9E3779B97F4A7C15)`, a pure function of
//! `(s, j)`. That makes it counter-addressable: a stream positioned at any
//! offset can be constructed directly, so Monte Carlo runs can assign each
//! sample index its own fixed slice of the sequence and produce results that
//! do not depend on how the index range is split across threads.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 stream.
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// A stream positioned as if `offset` outputs had already been consumed
    /// from `SplitMix64::new(seed)`.
    pub fn at_offset(seed: u64, offset: u64) -> Self {
        Self {
            state: seed.wrapping_add(GOLDEN.wrapping_mul(offset)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normal draws via the Box–Muller transform.
    /// Consumes exactly two outputs.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.next_f64(); // in (0, 1], so the log is finite
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_stream_matches_skipped_stream() {
        let mut base = SplitMix64::new(12345);
        for _ in 0..17 {
            base.next_u64();
        }
        let mut jumped = SplitMix64::at_offset(12345, 17);
        for _ in 0..10 {
            assert_eq!(base.next_u64(), jumped.next_u64());
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn normal_pair_moments() {
        let mut rng = SplitMix64::new(99);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let (a, b) = rng.next_normal_pair();
            sum += a + b;
            sumsq += a * a + b * b;
        }
        let count = (2 * n) as f64;
        let mean = sum / count;
        let var = sumsq / count - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }
}

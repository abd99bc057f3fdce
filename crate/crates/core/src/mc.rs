//! Monte Carlo validation of the closed forms by plain rejection sampling.
//!
//! No importance sampling, no control variates: the oracle's value is its
//! independence from the code it checks, so it simulates the generative model
//! directly and conditions by rejection. Grade conditioning uses a window
//! |g - g₀| ≤ w rather than a kernel; the bias is O(w²) and shrinks with the
//! window (the trend is itself under test in the integration suite).
//!
//! Sampling is counter-addressed: sample `i` always consumes the same fixed
//! slice of the SplitMix64 sequence, so estimates are reproducible and
//! independent of how the index range is split across threads. Chunk partial
//! sums are merged in index order, which keeps even the floating-point
//! summation order fixed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::model::{AdmissionRule, PopulationPrior};
use crate::rng::SplitMix64;

/// Draws reserved per sample index in the underlying sequence.
const DRAWS_PER_SAMPLE: u64 = 8;
/// Fixed chunk size for parallel accumulation.
const CHUNK: u64 = 1 << 16;
/// Smallest sample budget the oracle accepts.
pub const MIN_SAMPLES: u64 = 100_000;
/// Estimates built on fewer accepted draws than this are refused.
pub const MIN_EFFECTIVE: u64 = 100;

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_effective: u64,
    pub seed: u64,
}

fn check_n(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::invalid(
            "n",
            format!("need at least {MIN_SAMPLES} samples, got {n}"),
        ));
    }
    Ok(())
}

/// Runs `sample` once per index in `0..n` and accumulates accepted values.
/// Chunk boundaries are fixed, so the merged sums do not depend on the
/// worker count.
fn accumulate<F>(n: u64, seed: u64, sample: F) -> (f64, f64, u64)
where
    F: Fn(&mut SplitMix64) -> Option<f64> + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<(f64, f64, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = n.min(start + CHUNK);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            let mut count = 0u64;
            for i in start..end {
                let mut rng = SplitMix64::at_offset(seed, i * DRAWS_PER_SAMPLE);
                if let Some(v) = sample(&mut rng) {
                    sum += v;
                    sumsq += v * v;
                    count += 1;
                }
            }
            (sum, sumsq, count)
        })
        .collect();
    partials
        .into_iter()
        .fold((0.0, 0.0, 0u64), |(s, sq, c), (ps, psq, pc)| {
            (s + ps, sq + psq, c + pc)
        })
}

fn estimate_from(sum: f64, sumsq: f64, count: u64, seed: u64) -> Result<McEstimate> {
    if count < MIN_EFFECTIVE {
        return Err(Error::UnderSampled {
            accepted: count,
            required: MIN_EFFECTIVE,
        });
    }
    let n = count as f64;
    let mean = sum / n;
    let var = ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok(McEstimate {
        value: mean,
        stderr: (var / n).sqrt(),
        n_effective: count,
        seed,
    })
}

/// Rejection estimate of `E[T | A = 1, G ≈ g_center]`: simulate students,
/// keep those admitted (Bernoulli at their score) whose grade lands inside
/// the window, and average the kept types.
#[allow(clippy::too_many_arguments)]
pub fn mc_posterior_mean(
    prior: &PopulationPrior,
    gamma: f64,
    rule: &AdmissionRule,
    g_center: f64,
    g_half_width: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    rule.validate()?;
    if rule.is_zero() {
        return Err(Error::ZeroProbability("rule admits nobody"));
    }
    if !g_center.is_finite() {
        return Err(Error::NonFinite("g_center"));
    }
    if !g_half_width.is_finite() || g_half_width <= 0.0 {
        return Err(Error::invalid("g_half_width", "must be finite and > 0"));
    }
    check_n(n)?;

    let (sum, sumsq, count) = accumulate(n, seed, |rng| {
        let (z_t, z_x) = rng.next_normal_pair();
        let t = prior.mu + prior.sigma * z_t;
        let s = t + z_x;
        let u = rng.next_f64();
        if u >= rule.prob_at(s) {
            return None;
        }
        let (z_y, _) = rng.next_normal_pair();
        let g = t + gamma * z_y;
        if (g - g_center).abs() <= g_half_width {
            Some(t)
        } else {
            None
        }
    });
    estimate_from(sum, sumsq, count, seed)
}

/// Estimate of the probability that a student of fixed type `t` is admitted
/// and then graded at or above `g_star`. Every draw counts, so
/// `n_effective = n`.
pub fn mc_hire_rate_given_type(
    gamma: f64,
    rule: &AdmissionRule,
    g_star: f64,
    t: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    rule.validate()?;
    if rule.is_zero() {
        return Err(Error::ZeroProbability("rule admits nobody"));
    }
    if !g_star.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("g_star/t"));
    }
    check_n(n)?;

    let (sum, sumsq, count) = accumulate(n, seed, |rng| {
        let (z_x, z_y) = rng.next_normal_pair();
        let s = t + z_x;
        let u = rng.next_f64();
        let admitted = u < rule.prob_at(s);
        let hired = admitted && t + gamma * z_y >= g_star;
        Some(if hired { 1.0 } else { 0.0 })
    });
    estimate_from(sum, sumsq, count, seed)
}

/// Rejection estimate of `E[T | S ≥ β]` for the no-grades pipeline.
pub fn mc_no_grades_mean(
    prior: &PopulationPrior,
    beta: ExtReal,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    if beta.is_pos_inf() {
        return Err(Error::ZeroProbability("threshold at +inf admits nobody"));
    }
    check_n(n)?;
    let (sum, sumsq, count) = accumulate(n, seed, |rng| {
        let (z_t, z_x) = rng.next_normal_pair();
        let t = prior.mu + prior.sigma * z_t;
        let s = t + z_x;
        let admitted = match beta {
            ExtReal::NegInf => true,
            ExtReal::Finite(b) => s >= b,
            ExtReal::PosInf => unreachable!(),
        };
        if admitted {
            Some(t)
        } else {
            None
        }
    });
    estimate_from(sum, sumsq, count, seed)
}

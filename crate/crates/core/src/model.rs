//! Domain types for the two-stage screening pipeline and its generative model.
//!
//! A student of group `i` has latent type `T ~ N(μᵢ, σᵢ²)`, exam score
//! `S = T + X` with `X ~ N(0, 1)` (the exam noise variance is fixed to one by
//! the model and is deliberately not configurable), and grade `G = T + Y`
//! with `Y ~ N(0, γ²)` independent of `X` given `T`.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gauss::{std_sf, GaussianParams};
use crate::rng::SplitMix64;

/// A group's Gaussian type distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationPrior {
    pub mu: f64,
    pub sigma: f64,
}

impl PopulationPrior {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::NonFinite("mu"));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::invalid("sigma", format!("must be finite and > 0, got {sigma}")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn as_gaussian(&self) -> GaussianParams {
        GaussianParams {
            mean: self.mu,
            sd: self.sigma,
        }
    }
}

/// The college's grading policy: noise level γ plus whether grades are
/// disclosed at all. `gamma` is ignored when `disclose` is false (the
/// no-grades regime is the γ → ∞ limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradingPolicy {
    pub gamma: f64,
    pub disclose: bool,
}

impl GradingPolicy {
    pub fn new(gamma: f64, disclose: bool) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
        }
        Ok(Self { gamma, disclose })
    }
}

/// The employer side: a single hiring cost when `c_min == c_max`, otherwise
/// an interval of costs that must all be served.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSpec {
    pub c_min: f64,
    pub c_max: f64,
}

impl CostSpec {
    pub fn new(c_min: f64, c_max: f64) -> Result<Self> {
        if !c_min.is_finite() || !c_max.is_finite() {
            return Err(Error::NonFinite("cost"));
        }
        if c_min > c_max {
            return Err(Error::invalid(
                "cost",
                format!("c_min ({c_min}) must not exceed c_max ({c_max})"),
            ));
        }
        Ok(Self { c_min, c_max })
    }

    pub fn single(c: f64) -> Result<Self> {
        Self::new(c, c)
    }

    pub fn is_single(&self) -> bool {
        self.c_min == self.c_max
    }
}

/// A monotone admission rule mapping exam scores to admission probabilities.
///
/// Randomized rules are right-continuous monotone step functions with a
/// finite knot list `(score, probability)`: probability 0 below the first
/// knot, `p_j` on `[s_j, s_{j+1})`, and the last probability from the last
/// knot onwards. Construct through [`AdmissionRule::threshold`],
/// [`AdmissionRule::step`] or the unit variants so the invariants hold.
#[derive(Debug, Clone, PartialEq)]
pub enum AdmissionRule {
    Threshold(ExtReal),
    MonotoneStep(Vec<(f64, f64)>),
    AdmitAll,
    AdmitNone,
}

impl AdmissionRule {
    pub fn threshold(beta: ExtReal) -> Self {
        AdmissionRule::Threshold(beta)
    }

    /// Validated step rule: scores strictly increasing, probabilities in
    /// [0, 1] and non-decreasing.
    pub fn step(knots: Vec<(f64, f64)>) -> Result<Self> {
        let rule = AdmissionRule::MonotoneStep(knots);
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AdmissionRule::Threshold(_) | AdmissionRule::AdmitAll | AdmissionRule::AdmitNone => {
                Ok(())
            }
            AdmissionRule::MonotoneStep(knots) => {
                if knots.is_empty() {
                    return Err(Error::invalid("knots", "step rule needs at least one knot"));
                }
                for window in knots.windows(2) {
                    if window[1].0 <= window[0].0 {
                        return Err(Error::invalid("knots", "scores must be strictly increasing"));
                    }
                    if window[1].1 < window[0].1 {
                        return Err(Error::invalid(
                            "knots",
                            "probabilities must be non-decreasing",
                        ));
                    }
                }
                for &(s, p) in knots {
                    if !s.is_finite() || !p.is_finite() {
                        return Err(Error::NonFinite("knots"));
                    }
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::invalid(
                            "knots",
                            format!("probability {p} outside [0, 1]"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether the rule admits nobody (the conditioning event `A = 1` has
    /// probability zero).
    pub fn is_zero(&self) -> bool {
        match self {
            AdmissionRule::AdmitNone => true,
            AdmissionRule::Threshold(b) => b.is_pos_inf(),
            AdmissionRule::MonotoneStep(knots) => knots.last().is_none_or(|&(_, p)| p == 0.0),
            AdmissionRule::AdmitAll => false,
        }
    }

    /// Admission probability at a realized score (the rule itself, not the
    /// type-conditional acceptance probability).
    pub fn prob_at(&self, s: f64) -> f64 {
        match self {
            AdmissionRule::AdmitAll => 1.0,
            AdmissionRule::AdmitNone => 0.0,
            AdmissionRule::Threshold(ExtReal::NegInf) => 1.0,
            AdmissionRule::Threshold(ExtReal::PosInf) => 0.0,
            AdmissionRule::Threshold(ExtReal::Finite(beta)) => {
                if s >= *beta {
                    1.0
                } else {
                    0.0
                }
            }
            AdmissionRule::MonotoneStep(knots) => {
                let mut p = 0.0;
                for &(score, prob) in knots {
                    if s >= score {
                        p = prob;
                    } else {
                        break;
                    }
                }
                p
            }
        }
    }

    /// The rule as constant-probability segments covering the whole score
    /// axis, for closed-form integration against Gaussian weights.
    pub(crate) fn segments(&self) -> Vec<(ExtReal, ExtReal, f64)> {
        match self {
            AdmissionRule::AdmitAll | AdmissionRule::Threshold(ExtReal::NegInf) => {
                vec![(ExtReal::NegInf, ExtReal::PosInf, 1.0)]
            }
            AdmissionRule::AdmitNone | AdmissionRule::Threshold(ExtReal::PosInf) => vec![],
            AdmissionRule::Threshold(ExtReal::Finite(beta)) => {
                vec![(ExtReal::Finite(*beta), ExtReal::PosInf, 1.0)]
            }
            AdmissionRule::MonotoneStep(knots) => {
                let mut segs = Vec::with_capacity(knots.len());
                for (i, &(score, prob)) in knots.iter().enumerate() {
                    if prob == 0.0 {
                        continue;
                    }
                    let hi = knots
                        .get(i + 1)
                        .map(|&(next, _)| ExtReal::Finite(next))
                        .unwrap_or(ExtReal::PosInf);
                    segs.push((ExtReal::Finite(score), hi, prob));
                }
                segs
            }
        }
    }

    /// Largest finite score at which the rule still changes, if any. Used to
    /// widen integration windows.
    pub(crate) fn max_finite_knot(&self) -> Option<f64> {
        match self {
            AdmissionRule::Threshold(ExtReal::Finite(beta)) => Some(*beta),
            AdmissionRule::MonotoneStep(knots) => knots.last().map(|&(s, _)| s),
            _ => None,
        }
    }
}

/// Type-conditional acceptance probability `x(t) = Pr[A = 1 | T = t]`.
///
/// For a threshold β this is `1 - Φ(β - t)`; for a step rule it is the exact
/// telescoped sum `Σ (p_j - p_{j-1}) · (1 - Φ(s_j - t))`. Non-decreasing in
/// `t` for every valid rule.
pub fn acceptance_probability(rule: &AdmissionRule, t: f64) -> Result<f64> {
    rule.validate()?;
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    Ok(acceptance_probability_unchecked(rule, t))
}

pub(crate) fn acceptance_probability_unchecked(rule: &AdmissionRule, t: f64) -> f64 {
    match rule {
        AdmissionRule::AdmitAll | AdmissionRule::Threshold(ExtReal::NegInf) => 1.0,
        AdmissionRule::AdmitNone | AdmissionRule::Threshold(ExtReal::PosInf) => 0.0,
        AdmissionRule::Threshold(ExtReal::Finite(beta)) => std_sf(beta - t),
        AdmissionRule::MonotoneStep(knots) => {
            let mut x = 0.0;
            let mut prev = 0.0;
            for &(score, prob) in knots {
                x += (prob - prev) * std_sf(score - t);
                prev = prob;
            }
            x
        }
    }
}

/// One draw from the generative model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentDraw {
    pub t: f64,
    pub s: f64,
    pub g: f64,
}

/// Samples a student: `t ~ N(μ, σ²)`, `s = t + N(0, 1)`, `g = t + N(0, γ²)`,
/// with independent noise draws. Deterministic given the rng state.
pub fn sample_student(
    prior: &PopulationPrior,
    grading: &GradingPolicy,
    rng: &mut SplitMix64,
) -> StudentDraw {
    let (z_t, z_x) = rng.next_normal_pair();
    let (z_y, _) = rng.next_normal_pair();
    let t = prior.mu + prior.sigma * z_t;
    StudentDraw {
        t,
        s: t + z_x,
        g: t + grading.gamma * z_y,
    }
}

/// Two priors, one grading policy, one cost specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub pop1: PopulationPrior,
    pub pop2: PopulationPrior,
    pub grading: GradingPolicy,
    pub cost: CostSpec,
}

impl Scenario {
    pub fn new(
        pop1: PopulationPrior,
        pop2: PopulationPrior,
        grading: GradingPolicy,
        cost: CostSpec,
    ) -> Self {
        Self {
            pop1,
            pop2,
            grading,
            cost,
        }
    }

    pub fn prior(&self, group: usize) -> &PopulationPrior {
        match group {
            1 => &self.pop1,
            2 => &self.pop2,
            _ => panic!("group must be 1 or 2"),
        }
    }

    /// Non-fatal validation notes. Identical priors make every fairness
    /// question trivial, which is useful in tests, so it only warns.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.pop1 == self.pop2 {
            w.push("pop1 and pop2 are identical; fairness questions are trivial".to_string());
        }
        w
    }

    pub fn has_distinct_priors(&self) -> bool {
        self.pop1 != self.pop2
    }
}

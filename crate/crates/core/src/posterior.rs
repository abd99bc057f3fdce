//! Employer-side inference.
//!
//! Three routes to the posterior expected type of an admitted student with a
//! given grade:
//!
//! * a closed form for threshold rules,
//!   `E[T | S ≥ β, G = g] = γ²μ/(σ²+γ²) + σ²g/(σ²+γ²) + γ²σ²/√(qr) · H((qβ - γ²μ - σ²g)/√(qr))`
//!   with `q = σ²+γ²`, `r = σ²+γ²+γ²σ²`;
//! * adaptive quadrature over types for arbitrary monotone rules (any
//!   moment, not just the mean);
//! * a reduction of the randomized-rule posterior to a one-dimensional
//!   score integral against the effective grade evidence, evaluated exactly
//!   for step rules as sums of Φ/φ segment terms.
//!
//! The posterior mean is continuous and strictly increasing in the grade with
//! limits ∓∞, so the hiring grade threshold `g*(C)` — the grade at which the
//! mean crosses the hiring cost — exists, is unique, and is found here by
//! bracket expansion plus bisection.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gauss::{
    gaussian_product, hazard, std_cdf, std_pdf, std_sf, GaussianParams,
};
use crate::model::{acceptance_probability_unchecked, AdmissionRule, PopulationPrior};
use crate::quad::{integrate, integrate_auto};

/// Residual tolerance for the g*(C) root find.
const GSTAR_RESIDUAL_TOL: f64 = 1e-10;
/// Cap on bracket-expansion doublings before declaring numerical pathology.
const MAX_BRACKET_EXPANSIONS: usize = 200;

/// The prior combined with the grade likelihood: effective evidence
/// `N(μ(g), λ²)` with `λ² = γ²σ²/(γ²+σ²)` and
/// `μ(g) = (γ²μ + σ²g)/(σ²+γ²)`, strictly increasing in `g`.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveGradeReduction {
    pub lambda_sq: f64,
    pub mu_of_g: f64,
}

impl EffectiveGradeReduction {
    pub fn new(prior: &PopulationPrior, gamma: f64, g: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !g.is_finite() {
            return Err(Error::NonFinite("g"));
        }
        let v = prior.sigma * prior.sigma;
        let g2 = gamma * gamma;
        Ok(Self {
            lambda_sq: g2 * v / (g2 + v),
            mu_of_g: (g2 * prior.mu + v * g) / (v + g2),
        })
    }
}

/// Which route produced a posterior mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosteriorMethod {
    ClosedForm,
    Quadrature,
    Reduction,
}

/// A posterior mean together with its provenance.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub grade: f64,
    pub rule: AdmissionRule,
    pub method: PosteriorMethod,
}

impl PosteriorSummary {
    /// Computes the posterior mean by the requested route. The closed form
    /// is only defined for threshold rules.
    pub fn compute(
        prior: &PopulationPrior,
        gamma: f64,
        rule: &AdmissionRule,
        g: f64,
        method: PosteriorMethod,
    ) -> Result<Self> {
        let mean = match method {
            PosteriorMethod::ClosedForm => match rule {
                AdmissionRule::Threshold(beta) => posterior_mean_threshold(prior, gamma, *beta, g)?,
                _ => {
                    return Err(Error::invalid(
                        "method",
                        "closed form is only available for threshold rules",
                    ))
                }
            },
            PosteriorMethod::Quadrature => posterior_moment(prior, gamma, rule, g, 1)?,
            PosteriorMethod::Reduction => posterior_mean_randomized(prior, gamma, rule, g)?,
        };
        Ok(Self {
            mean,
            grade: g,
            rule: rule.clone(),
            method,
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    Ok(())
}

/// Closed-form `E[T | S ≥ β, G = g]` for a threshold rule.
///
/// Strictly increasing in `g`, `μ` and `β`; the `-inf` sentinel drops the
/// hazard term and returns the admit-all limit `(γ²μ + σ²g)/(σ²+γ²)`.
pub fn posterior_mean_threshold(
    prior: &PopulationPrior,
    gamma: f64,
    beta: ExtReal,
    g: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    if !g.is_finite() {
        return Err(Error::NonFinite("g"));
    }
    let v = prior.sigma * prior.sigma;
    let g2 = gamma * gamma;
    let q = v + g2;
    let r = q + g2 * v;
    let base = (g2 * prior.mu + v * g) / q;
    match beta {
        ExtReal::NegInf => Ok(base),
        ExtReal::PosInf => Err(Error::ZeroProbability("threshold at +inf admits nobody")),
        ExtReal::Finite(b) => {
            let scale = (q * r).sqrt();
            let arg = (q * b - g2 * prior.mu - v * g) / scale;
            Ok(base + (g2 * v / scale) * hazard(arg)?)
        }
    }
}

/// `E[T^k | G = g, A = 1]` for any non-zero monotone rule, by adaptive
/// quadrature over a ±12-effective-sd window of the prior × grade-likelihood
/// product. `k` is capped at 8; higher moments are numerically fragile and
/// nothing here needs them.
pub fn posterior_moment(
    prior: &PopulationPrior,
    gamma: f64,
    rule: &AdmissionRule,
    g: f64,
    k: u32,
) -> Result<f64> {
    check_gamma(gamma)?;
    rule.validate()?;
    if rule.is_zero() {
        return Err(Error::ZeroProbability("rule admits nobody"));
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("g"));
    }
    if k == 0 || k > 8 {
        return Err(Error::invalid("k", format!("moment order must be in 1..=8, got {k}")));
    }

    let product = gaussian_product(
        &prior.as_gaussian(),
        &GaussianParams::new(g, gamma)?,
    );
    let lo = product.mean - 12.0 * product.sd;
    let hi = product.mean + 12.0 * product.sd;
    let center = product.mean;
    let sd = product.sd;
    // Weight by the normalized product density so both integrals stay O(1).
    let weight = move |t: f64| std_pdf((t - center) / sd) / sd;

    let den = integrate_auto(|t| acceptance_probability_unchecked(rule, t) * weight(t), lo, hi);
    if den.value <= 1e-280 {
        return Err(Error::ZeroProbability(
            "acceptance probability vanishes over the whole grade window",
        ));
    }
    if !den.converged {
        return Err(Error::QuadratureAccuracy {
            estimate: den.error / den.value.abs(),
            target: 1e-9,
        });
    }

    // Odd moments can be legitimately zero, so the numerator needs an
    // absolute floor scaled by the window's largest |t|^k.
    let t_max = lo.abs().max(hi.abs()).max(1.0);
    let abs_tol = den.value * t_max.powi(k as i32) * 1e-12;
    let num = integrate(
        |t| t.powi(k as i32) * acceptance_probability_unchecked(rule, t) * weight(t),
        lo,
        hi,
        1e-12,
        abs_tol,
        2048,
    );
    if !num.converged {
        return Err(Error::QuadratureAccuracy {
            estimate: num.error,
            target: abs_tol,
        });
    }
    Ok(num.value / den.value)
}

/// `E[T | G = g, A = 1]` via the effective-grade reduction: fold the grade
/// into the prior, integrate over scores instead of types. For step rules the
/// score integral is an exact sum of Gaussian segment terms, so the only
/// approximation anywhere is in Φ itself.
pub fn posterior_mean_randomized(
    prior: &PopulationPrior,
    gamma: f64,
    rule: &AdmissionRule,
    g: f64,
) -> Result<f64> {
    rule.validate()?;
    if rule.is_zero() {
        return Err(Error::ZeroProbability("rule admits nobody"));
    }
    let red = EffectiveGradeReduction::new(prior, gamma, g)?;
    let v = (red.lambda_sq + 1.0).sqrt(); // sd of the score integral weight
    let m = red.mu_of_g;

    // Conditional mean of a score ~ N(m, v²) reweighted by the step rule:
    // accumulate mass and first-moment contributions per constant segment.
    let mut mass = 0.0;
    let mut first = 0.0;
    for (lo, hi, p) in rule.segments() {
        let z_lo = match lo {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(s) => (s - m) / v,
            ExtReal::PosInf => unreachable!("segment cannot start at +inf"),
        };
        let z_hi = match hi {
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::Finite(s) => (s - m) / v,
            ExtReal::NegInf => unreachable!("segment cannot end at -inf"),
        };
        let seg_mass = segment_mass(z_lo, z_hi);
        let pdf_lo = if z_lo.is_finite() { std_pdf(z_lo) } else { 0.0 };
        let pdf_hi = if z_hi.is_finite() { std_pdf(z_hi) } else { 0.0 };
        mass += p * seg_mass;
        first += p * (m * seg_mass + v * (pdf_lo - pdf_hi));
    }
    if mass <= 0.0 {
        return Err(Error::ZeroProbability(
            "acceptance mass underflows for this grade",
        ));
    }
    let score_avg = first / mass;
    Ok(m / (red.lambda_sq + 1.0) + red.lambda_sq / (1.0 + red.lambda_sq) * score_avg)
}

/// Φ(z_hi) - Φ(z_lo), taken through whichever tail keeps precision.
fn segment_mass(z_lo: f64, z_hi: f64) -> f64 {
    if z_lo == f64::NEG_INFINITY && z_hi == f64::INFINITY {
        return 1.0;
    }
    if z_lo == f64::NEG_INFINITY {
        return std_cdf(z_hi);
    }
    if z_hi == f64::INFINITY {
        return std_sf(z_lo);
    }
    if z_lo + z_hi > 0.0 {
        std_sf(z_lo) - std_sf(z_hi)
    } else {
        std_cdf(z_hi) - std_cdf(z_lo)
    }
}

fn posterior_mean_for_rule(
    prior: &PopulationPrior,
    gamma: f64,
    rule: &AdmissionRule,
    g: f64,
) -> Result<f64> {
    match rule {
        AdmissionRule::Threshold(beta) => posterior_mean_threshold(prior, gamma, *beta, g),
        _ => posterior_mean_randomized(prior, gamma, rule, g),
    }
}

/// The hiring grade threshold g*(C): the unique grade at which the posterior
/// mean equals the hiring cost.
///
/// Solved to |mean(g*) - C| ≤ 1e-10 by geometric bracket expansion from the
/// admit-all inverse followed by bisection; the mean's strict monotonicity
/// and infinite limits guarantee a bracket exists.
pub fn hiring_grade_threshold(
    prior: &PopulationPrior,
    gamma: f64,
    rule: &AdmissionRule,
    c: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    rule.validate()?;
    if rule.is_zero() {
        return Err(Error::ZeroProbability("rule admits nobody"));
    }
    if !c.is_finite() {
        return Err(Error::NonFinite("c"));
    }

    let v = prior.sigma * prior.sigma;
    let g2 = gamma * gamma;
    // Admit-all inverse: (γ²μ + σ²g)/(σ²+γ²) = C. Conditioning on admission
    // only raises the mean, so the root lies at or below this grade.
    let g0 = ((v + g2) * c - g2 * prior.mu) / v;

    let f = |g: f64| posterior_mean_for_rule(prior, gamma, rule, g).map(|m| m - c);

    let mut hi = g0;
    let mut f_hi = f(hi)?;
    let mut step = 1.0 + prior.sigma;
    let mut expansions = 0;
    while f_hi < 0.0 {
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(Error::Bracketing {
                context: "hiring_grade_threshold upper bracket",
                expansions,
            });
        }
        hi += step;
        step *= 2.0;
        f_hi = f(hi)?;
    }

    let mut step = 1.0 + prior.sigma;
    let mut lo = hi - step;
    let mut f_lo = f(lo)?;
    let mut expansions = 0;
    while f_lo >= 0.0 {
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(Error::Bracketing {
                context: "hiring_grade_threshold lower bracket",
                expansions,
            });
        }
        step *= 2.0;
        lo -= step;
        f_lo = f(lo)?;
    }

    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() <= GSTAR_RESIDUAL_TOL {
            return Ok(mid);
        }
        if f_mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NonConvergence(format!(
        "g* bisection stalled on [{lo}, {hi}] for C = {c}"
    )))
}

/// The density of admitted types, `Pr[T = t | A = 1] = x(t)·p(t)/Z`, with the
/// normalizer computed once by quadrature.
#[derive(Debug, Clone)]
pub struct AdmittedTypeDensity {
    prior: GaussianParams,
    rule: AdmissionRule,
    normalizer: f64,
}

impl AdmittedTypeDensity {
    pub fn new(prior: &PopulationPrior, rule: &AdmissionRule) -> Result<Self> {
        rule.validate()?;
        if rule.is_zero() {
            return Err(Error::ZeroProbability("rule admits nobody"));
        }
        let g = prior.as_gaussian();
        let lo = g.mean - 12.0 * g.sd;
        let hi = (g.mean + 12.0 * g.sd).max(
            rule.max_finite_knot()
                .map_or(f64::NEG_INFINITY, |knot| knot + 12.0),
        );
        let est = integrate_auto(
            |t| acceptance_probability_unchecked(rule, t) * g.pdf(t),
            lo,
            hi,
        );
        if !est.converged {
            return Err(Error::QuadratureAccuracy {
                estimate: est.error,
                target: 1e-12 * est.value.abs(),
            });
        }
        if est.value <= 1e-300 {
            return Err(Error::ZeroProbability("admission probability underflows"));
        }
        Ok(Self {
            prior: g,
            rule: rule.clone(),
            normalizer: est.value,
        })
    }

    pub fn density_at(&self, t: f64) -> f64 {
        acceptance_probability_unchecked(&self.rule, t) * self.prior.pdf(t) / self.normalizer
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }
}

/// One-shot evaluation of the admitted-type density at `t`.
pub fn admitted_type_density(
    prior: &PopulationPrior,
    rule: &AdmissionRule,
    t: f64,
) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    Ok(AdmittedTypeDensity::new(prior, rule)?.density_at(t))
}

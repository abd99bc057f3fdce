//! Constructive solvers for the regimes where fairness goals are attainable.
//!
//! * Single known hiring cost with disclosed grades: per-group admission
//!   thresholds can always be tuned so both groups' posterior means cross the
//!   cost at one common grade, making the hire decision group-blind.
//! * No grades: one sufficiently high common threshold makes every admit
//!   worth hiring, which yields group-blind hiring and equal opportunity at
//!   once.
//! * Noiseless exams: admitting exactly the types above the top of the cost
//!   interval achieves both goals for any grading policy.
//! * γ = 1: the mutual-consistency condition that equal opportunity imposes
//!   on a pair of thresholds, solved by a damped fixed-point iteration. No
//!   convergence theory exists for this iteration, so the solver reports its
//!   trajectory and never assumes success.

use crate::audit::{hire_probability_given_type, type_grid};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gauss::{hazard, GaussianParams, ProductResult};
use crate::model::{AdmissionRule, PopulationPrior, Scenario};
use crate::posterior::{hiring_grade_threshold, posterior_mean_threshold};

/// Residual size below which a calibration counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Solvers push residuals well below the convergence bound.
const SOLVE_TOL: f64 = 1e-10;
const MAX_EXPANSIONS: usize = 200;
const FIXED_POINT_DAMPING: f64 = 0.5;
const FIXED_POINT_MAX_ITER: usize = 500;

/// One step of the equal-opportunity fixed-point iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub beta1: f64,
    pub beta2: f64,
    pub residual1: f64,
    pub residual2: f64,
}

/// Output of the calibration solvers.
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub beta1: f64,
    pub beta2: f64,
    /// The common hiring grade threshold, when the solver produces one.
    pub g_star: Option<f64>,
    pub residual1: f64,
    pub residual2: f64,
    pub converged: bool,
    /// Equal-opportunity gap over the audit type grid (γ = 1 solver only).
    pub eo_residual: Option<f64>,
    /// Iteration trajectory (γ = 1 solver only); diagnostic on divergence.
    pub trajectory: Vec<IterationRecord>,
}

/// Solves the posterior mean in β at a fixed grade: increasing from the
/// admit-all limit to +∞, so expansion plus bisection always lands.
fn solve_beta_for_cost(prior: &PopulationPrior, gamma: f64, g: f64, c: f64) -> Result<f64> {
    let v = prior.sigma * prior.sigma;
    let g2 = gamma * gamma;
    let f = |beta: f64| posterior_mean_threshold(prior, gamma, ExtReal::Finite(beta), g).map(|m| m - c);

    // Start where the hazard argument vanishes.
    let mut hi = (g2 * prior.mu + v * g) / (v + g2);
    let mut f_hi = f(hi)?;
    let mut step = 1.0 + prior.sigma;
    let mut expansions = 0;
    while f_hi < 0.0 {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::Bracketing {
                context: "admission threshold upper bracket",
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
        if expansions > MAX_EXPANSIONS {
            return Err(Error::Bracketing {
                context: "admission threshold lower bracket",
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
        if f_mid.abs() <= SOLVE_TOL {
            return Ok(mid);
        }
        if f_mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NonConvergence(format!(
        "β bisection stalled on [{lo}, {hi}] for C = {c}"
    )))
}

/// Group-blind hiring at a single known cost: picks a grade g* low enough
/// that both groups' admit-all means sit at least 1.0 below C, then solves
/// each group's admission threshold so the posterior mean at g* equals C.
/// The posterior means then cross C at the same grade for both groups, so the
/// employer's decision is hire iff g ≥ g*, independent of group.
pub fn calibrate_single_threshold_igm(scenario: &Scenario) -> Result<CalibrationResult> {
    if !scenario.grading.disclose {
        return Err(Error::invalid("disclose", "IGM calibration needs disclosed grades"));
    }
    if !scenario.cost.is_single() {
        return Err(Error::invalid(
            "cost",
            "IGM calibration targets a single cost; got an interval",
        ));
    }
    let c = scenario.cost.c_min;
    let gamma = scenario.grading.gamma;
    let g2 = gamma * gamma;

    // Largest grade keeping the admit-all mean ≤ C - 1 in both groups; the
    // unit of slack keeps the hazard arguments moderate.
    let bound = |p: &PopulationPrior| {
        let v = p.sigma * p.sigma;
        ((c - 1.0) * (v + g2) - g2 * p.mu) / v
    };
    let g_star = bound(&scenario.pop1).min(bound(&scenario.pop2));

    let beta1 = solve_beta_for_cost(&scenario.pop1, gamma, g_star, c)?;
    let beta2 = solve_beta_for_cost(&scenario.pop2, gamma, g_star, c)?;
    let residual1 =
        posterior_mean_threshold(&scenario.pop1, gamma, ExtReal::Finite(beta1), g_star)? - c;
    let residual2 =
        posterior_mean_threshold(&scenario.pop2, gamma, ExtReal::Finite(beta2), g_star)? - c;
    Ok(CalibrationResult {
        beta1,
        beta2,
        g_star: Some(g_star),
        residual1,
        residual2,
        converged: residual1.abs() <= CONVERGENCE_TOL && residual2.abs() <= CONVERGENCE_TOL,
        eo_residual: None,
        trajectory: Vec::new(),
    })
}

/// `E[T | S ≥ β]` when no grades are reported: the score marginal is
/// N(μ, 1+σ²), so the mean is `μ + σ²·H((β-μ)/√(1+σ²))/√(1+σ²)`.
pub fn no_grades_posterior_mean(prior: &PopulationPrior, beta: ExtReal) -> Result<f64> {
    let s = (1.0 + prior.sigma * prior.sigma).sqrt();
    match beta {
        ExtReal::NegInf => Ok(prior.mu),
        ExtReal::PosInf => Err(Error::ZeroProbability("threshold at +inf admits nobody")),
        ExtReal::Finite(b) => {
            Ok(prior.mu + prior.sigma * prior.sigma / s * hazard((b - prior.mu) / s)?)
        }
    }
}

/// The smallest common admission threshold under grade non-disclosure such
/// that every admitted student from either group is worth hiring at the top
/// of the cost interval. With that threshold every admit is hired, so both
/// group-blind hiring and equal opportunity hold.
///
/// Returns the `-inf` sentinel when both prior means already clear the cost
/// (admit everyone).
pub fn no_grades_threshold(scenario: &Scenario) -> Result<ExtReal> {
    if scenario.grading.disclose {
        return Err(Error::invalid(
            "disclose",
            "no-grades calibration requires disclose = false",
        ));
    }
    let target = scenario.cost.c_max;

    let group_bound = |prior: &PopulationPrior| -> Result<ExtReal> {
        if prior.mu >= target {
            // Even admit-all satisfies this group's constraint.
            return Ok(ExtReal::NegInf);
        }
        let f = |beta: f64| no_grades_posterior_mean(prior, ExtReal::Finite(beta)).map(|m| m - target);
        let mut hi = target;
        let mut f_hi = f(hi)?;
        let mut step = 1.0 + prior.sigma;
        let mut expansions = 0;
        while f_hi < 0.0 {
            expansions += 1;
            if expansions > MAX_EXPANSIONS {
                return Err(Error::Bracketing {
                    context: "no-grades upper bracket",
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
            if expansions > MAX_EXPANSIONS {
                return Err(Error::Bracketing {
                    context: "no-grades lower bracket",
                    expansions,
                });
            }
            step *= 2.0;
            lo -= step;
            f_lo = f(lo)?;
        }
        // The constraint is one-sided, so converge on the bracket width and
        // return the side where the mean is at or above the target.
        for _ in 0..400 {
            if hi - lo <= 1e-9 {
                return Ok(ExtReal::Finite(hi));
            }
            let mid = 0.5 * (lo + hi);
            if f(mid)? >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NonConvergence("no-grades bisection stalled".to_string()))
    };

    let b1 = group_bound(&scenario.pop1)?;
    let b2 = group_bound(&scenario.pop2)?;
    // The binding constraint is the larger of the two group thresholds.
    Ok(match (b1, b2) {
        (ExtReal::NegInf, other) => other,
        (other, ExtReal::NegInf) => other,
        (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.max(b)),
        _ => unreachable!("group bounds are -inf or finite"),
    })
}

/// The rule for perfectly observable types: admit exactly the types at or
/// above the top of the cost interval. Every admit then has type ≥ C⁺, the
/// employer hires them all regardless of grade, and both fairness goals hold
/// for every cost in the interval under any grading policy.
pub fn noiseless_rule(cost: &crate::model::CostSpec) -> AdmissionRule {
    AdmissionRule::Threshold(ExtReal::Finite(cost.c_max))
}

/// Damped fixed-point search for the γ = 1 equal-opportunity condition:
/// thresholds satisfying `β₁ = g₂*(C)` and `β₂ = g₁*(C)` simultaneously,
/// i.e. `E[T₁|G₁=β₂, S₁≥β₁] = E[T₂|G₂=β₁, S₂≥β₂] = C`.
///
/// The condition is necessary for equal opportunity at γ = 1 (and equal
/// opportunity is impossible for γ ≠ 1 with threshold rules); whether it is
/// attainable in a given instance is exactly what this iteration probes, so
/// the result always carries the trajectory and the measured equal
/// opportunity gap rather than a claim.
pub fn eo_fixed_point_gamma1(scenario: &Scenario) -> Result<CalibrationResult> {
    if !scenario.grading.disclose {
        return Err(Error::invalid("disclose", "γ = 1 solver needs disclosed grades"));
    }
    if scenario.grading.gamma != 1.0 {
        return Err(Error::invalid(
            "gamma",
            format!(
                "equal opportunity with threshold rules requires gamma = 1 exactly, got {}",
                scenario.grading.gamma
            ),
        ));
    }
    if !scenario.cost.is_single() {
        return Err(Error::invalid("cost", "γ = 1 solver targets a single cost"));
    }
    let c = scenario.cost.c_min;

    let mut beta1 = c;
    let mut beta2 = c;
    let mut trajectory = Vec::new();
    let mut converged = false;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let target1 = hiring_grade_threshold(
            &scenario.pop2,
            1.0,
            &AdmissionRule::Threshold(ExtReal::Finite(beta2)),
            c,
        )?;
        let target2 = hiring_grade_threshold(
            &scenario.pop1,
            1.0,
            &AdmissionRule::Threshold(ExtReal::Finite(beta1)),
            c,
        )?;
        beta1 += FIXED_POINT_DAMPING * (target1 - beta1);
        beta2 += FIXED_POINT_DAMPING * (target2 - beta2);

        let residual1 =
            posterior_mean_threshold(&scenario.pop1, 1.0, ExtReal::Finite(beta1), beta2)? - c;
        let residual2 =
            posterior_mean_threshold(&scenario.pop2, 1.0, ExtReal::Finite(beta2), beta1)? - c;
        trajectory.push(IterationRecord {
            beta1,
            beta2,
            residual1,
            residual2,
        });
        if residual1.abs() <= CONVERGENCE_TOL && residual2.abs() <= CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }

    let last = trajectory.last().copied().unwrap_or(IterationRecord {
        beta1,
        beta2,
        residual1: f64::NAN,
        residual2: f64::NAN,
    });

    // Measure the equal-opportunity gap the found thresholds actually
    // deliver, whether or not the iteration converged.
    let rule1 = AdmissionRule::Threshold(ExtReal::Finite(beta1));
    let rule2 = AdmissionRule::Threshold(ExtReal::Finite(beta2));
    let g1 = hiring_grade_threshold(&scenario.pop1, 1.0, &rule1, c)?;
    let g2 = hiring_grade_threshold(&scenario.pop2, 1.0, &rule2, c)?;
    let mut eo_sup: f64 = 0.0;
    for t in type_grid(&scenario.pop1, &scenario.pop2).points() {
        let hp1 = hire_probability_given_type(1.0, &rule1, g1, t)?;
        let hp2 = hire_probability_given_type(1.0, &rule2, g2, t)?;
        eo_sup = eo_sup.max((hp1 - hp2).abs());
    }

    Ok(CalibrationResult {
        beta1,
        beta2,
        g_star: None,
        residual1: last.residual1,
        residual2: last.residual2,
        converged,
        eo_residual: Some(eo_sup),
        trajectory,
    })
}

/// Effective posterior evidence for a noiseless exam pipeline: the product
/// of the prior with the grade likelihood at `g`.
pub(crate) fn noiseless_grade_evidence(
    prior: &PopulationPrior,
    gamma: f64,
    g: f64,
) -> ProductResult {
    crate::gauss::gaussian_product(
        &prior.as_gaussian(),
        &GaussianParams {
            mean: g,
            sd: gamma,
        },
    )
}

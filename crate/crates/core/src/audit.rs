//! Fairness metrics and sweep harnesses.
//!
//! Three metrics, all evaluated as suprema over declared grids:
//!
//! * equal-opportunity gap — the largest difference, over types, in the
//!   probability of making it through the whole pipeline;
//! * group-membership violation — the largest difference, over audited
//!   costs, between the two groups' hiring grade thresholds (the employer's
//!   decision is group-blind exactly when these coincide);
//! * strong-violation gap — the sup distance between the two groups'
//!   admitted-type densities (the posteriors conditional on admission agree
//!   for every grade iff these densities agree pointwise).
//!
//! The sweep harness evaluates a chosen metric over a grid of threshold
//! pairs and reports the grid minimum: a strictly positive floor across the
//! whole grid is the numerical exhibit of an impossibility.

use rayon::prelude::*;

use crate::calibration::no_grades_posterior_mean;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gauss::{std_sf, truncated_mean, GaussianParams};
use crate::model::{
    acceptance_probability_unchecked, AdmissionRule, CostSpec, PopulationPrior, Scenario,
};
use crate::posterior::{hiring_grade_threshold, AdmittedTypeDensity};
use crate::quad::integrate_auto;

/// Default resolution of the type grid.
pub const T_GRID_POINTS: usize = 2001;
/// Default resolution of the cost grid over an interval.
pub const C_GRID_POINTS: usize = 101;

/// An inclusive uniform evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite("grid bounds"));
        }
        if n == 0 || (n == 1 && lo != hi) || lo > hi {
            return Err(Error::invalid("grid", format!("bad grid [{lo}, {hi}] x {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == self.n - 1 {
                    self.hi
                } else {
                    self.lo + i as f64 * step
                }
            })
            .collect()
    }
}

/// Type grid spanning the union of both priors' ±6σ ranges.
pub fn type_grid(pop1: &PopulationPrior, pop2: &PopulationPrior) -> GridSpec {
    let lo = (pop1.mu - 6.0 * pop1.sigma).min(pop2.mu - 6.0 * pop2.sigma);
    let hi = (pop1.mu + 6.0 * pop1.sigma).max(pop2.mu + 6.0 * pop2.sigma);
    GridSpec {
        lo,
        hi,
        n: T_GRID_POINTS,
    }
}

/// Cost grid over the audited interval; a single cost degenerates to one point.
pub fn cost_grid(cost: &CostSpec) -> GridSpec {
    if cost.is_single() {
        GridSpec {
            lo: cost.c_min,
            hi: cost.c_max,
            n: 1,
        }
    } else {
        GridSpec {
            lo: cost.c_min,
            hi: cost.c_max,
            n: C_GRID_POINTS,
        }
    }
}

/// All three metrics with their witnesses and the grids they were taken over.
#[derive(Debug, Clone)]
pub struct FairnessReport {
    pub eo_gap: f64,
    /// Type attaining the equal-opportunity gap.
    pub eo_argmax: f64,
    pub igm_violation: f64,
    /// Cost attaining the violation.
    pub igm_argmax: f64,
    pub sigm_gap: f64,
    pub t_grid: GridSpec,
    pub c_grid: GridSpec,
}

/// Probability that a student of type `t` passes the whole pipeline:
/// admitted with probability `x(t)`, then graded at or above `g*`, i.e.
/// `x(t) · (1 - Φ((g* - t)/γ))`.
pub fn hire_probability_given_type(
    gamma: f64,
    rule: &AdmissionRule,
    g_star: f64,
    t: f64,
) -> Result<f64> {
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
    Ok(acceptance_probability_unchecked(rule, t) * std_sf((g_star - t) / gamma))
}

fn check_rules(rule1: &AdmissionRule, rule2: &AdmissionRule) -> Result<()> {
    rule1.validate()?;
    rule2.validate()?;
    if rule1.is_zero() || rule2.is_zero() {
        return Err(Error::ZeroProbability("audit needs non-zero rules"));
    }
    Ok(())
}

/// Mean admitted type `E[T | A = 1]`: closed form for thresholds, density
/// quadrature otherwise. This is the only quantity the employer can act on
/// when grades are withheld.
fn admitted_mean(prior: &PopulationPrior, rule: &AdmissionRule) -> Result<f64> {
    match rule {
        AdmissionRule::Threshold(beta) => no_grades_posterior_mean(prior, *beta),
        AdmissionRule::AdmitAll => Ok(prior.mu),
        _ => {
            let density = AdmittedTypeDensity::new(prior, rule)?;
            let g = prior.as_gaussian();
            let lo = g.mean - 12.0 * g.sd;
            let hi = (g.mean + 12.0 * g.sd).max(
                rule.max_finite_knot()
                    .map_or(f64::NEG_INFINITY, |k| k + 12.0),
            );
            let est = integrate_auto(|t| t * density.density_at(t), lo, hi);
            if !est.converged {
                return Err(Error::QuadratureAccuracy {
                    estimate: est.error,
                    target: 1e-9,
                });
            }
            Ok(est.value)
        }
    }
}

/// Equal-opportunity gap: `sup_t |hp₁(t) - hp₂(t)|` with the hiring grade
/// thresholds recomputed at each audited cost (a single-cost scenario audits
/// one threshold pair; an interval audits the gap uniformly over the cost
/// grid). Returns `(gap, argmax type)`.
pub fn eo_gap(
    scenario: &Scenario,
    rule1: &AdmissionRule,
    rule2: &AdmissionRule,
) -> Result<(f64, f64)> {
    check_rules(rule1, rule2)?;
    let ts = type_grid(&scenario.pop1, &scenario.pop2).points();
    let x1: Vec<f64> = ts.iter().map(|&t| acceptance_probability_unchecked(rule1, t)).collect();
    let x2: Vec<f64> = ts.iter().map(|&t| acceptance_probability_unchecked(rule2, t)).collect();
    let mut gap = 0.0f64;
    let mut argmax = ts[0];

    if !scenario.grading.disclose {
        // No grades: the employer either hires every admit or nobody, per
        // group, depending on whether the admitted mean clears the cost.
        let e1 = admitted_mean(&scenario.pop1, rule1)?;
        let e2 = admitted_mean(&scenario.pop2, rule2)?;
        for c in cost_grid(&scenario.cost).points() {
            let h1 = if e1 >= c { 1.0 } else { 0.0 };
            let h2 = if e2 >= c { 1.0 } else { 0.0 };
            for (i, &t) in ts.iter().enumerate() {
                let d = (x1[i] * h1 - x2[i] * h2).abs();
                if d > gap {
                    gap = d;
                    argmax = t;
                }
            }
        }
        return Ok((gap, argmax));
    }

    let gamma = scenario.grading.gamma;
    for c in cost_grid(&scenario.cost).points() {
        let g1 = hiring_grade_threshold(&scenario.pop1, gamma, rule1, c)?;
        let g2 = hiring_grade_threshold(&scenario.pop2, gamma, rule2, c)?;
        for (i, &t) in ts.iter().enumerate() {
            let d = (x1[i] * std_sf((g1 - t) / gamma) - x2[i] * std_sf((g2 - t) / gamma)).abs();
            if d > gap {
                gap = d;
                argmax = t;
            }
        }
    }
    Ok((gap, argmax))
}

/// Group-membership violation: `sup_C |g₁*(C) - g₂*(C)|` over the cost grid.
/// Zero exactly when the hire/reject decision coincides across groups at
/// every audited cost. Returns `(violation, argmax cost)`.
///
/// Without grades the decision is a per-group constant, so the metric
/// becomes the 0/1 disagreement of the hire-all indicators over the grid.
pub fn igm_violation(
    scenario: &Scenario,
    rule1: &AdmissionRule,
    rule2: &AdmissionRule,
) -> Result<(f64, f64)> {
    check_rules(rule1, rule2)?;
    let cs = cost_grid(&scenario.cost).points();
    let mut violation = 0.0f64;
    let mut argmax = cs[0];

    if !scenario.grading.disclose {
        let e1 = admitted_mean(&scenario.pop1, rule1)?;
        let e2 = admitted_mean(&scenario.pop2, rule2)?;
        for &c in &cs {
            let d = if (e1 >= c) == (e2 >= c) { 0.0 } else { 1.0 };
            if d > violation {
                violation = d;
                argmax = c;
            }
        }
        return Ok((violation, argmax));
    }

    let gamma = scenario.grading.gamma;
    for &c in &cs {
        let g1 = hiring_grade_threshold(&scenario.pop1, gamma, rule1, c)?;
        let g2 = hiring_grade_threshold(&scenario.pop2, gamma, rule2, c)?;
        let d = (g1 - g2).abs();
        if d > violation {
            violation = d;
            argmax = c;
        }
    }
    Ok((violation, argmax))
}

/// Sup distance between the admitted-type densities over the type grid.
/// Strictly positive for distinct priors, whatever the thresholds.
pub fn sigm_gap(
    scenario: &Scenario,
    rule1: &AdmissionRule,
    rule2: &AdmissionRule,
) -> Result<f64> {
    check_rules(rule1, rule2)?;
    let d1 = AdmittedTypeDensity::new(&scenario.pop1, rule1)?;
    let d2 = AdmittedTypeDensity::new(&scenario.pop2, rule2)?;
    let mut gap = 0.0f64;
    for t in type_grid(&scenario.pop1, &scenario.pop2).points() {
        gap = gap.max((d1.density_at(t) - d2.density_at(t)).abs());
    }
    Ok(gap)
}

/// All three metrics in one report.
pub fn fairness_report(
    scenario: &Scenario,
    rule1: &AdmissionRule,
    rule2: &AdmissionRule,
) -> Result<FairnessReport> {
    let (eo, eo_argmax) = eo_gap(scenario, rule1, rule2)?;
    let (igm, igm_argmax) = igm_violation(scenario, rule1, rule2)?;
    let sigm = sigm_gap(scenario, rule1, rule2)?;
    Ok(FairnessReport {
        eo_gap: eo,
        eo_argmax,
        igm_violation: igm,
        igm_argmax,
        sigm_gap: sigm,
        t_grid: type_grid(&scenario.pop1, &scenario.pop2),
        c_grid: cost_grid(&scenario.cost),
    })
}

/// Which violation functional a sweep minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// sup over the cost grid of |g₁*(C) - g₂*(C)|.
    MultiIgm,
    /// sup over the cost and type grids of the hire-probability difference.
    MultiEo,
    /// sup over the type grid of the admitted-density difference.
    Sigm,
}

impl SweepTarget {
    pub fn name(&self) -> &'static str {
        match self {
            SweepTarget::MultiIgm => "multi-igm",
            SweepTarget::MultiEo => "multi-eo",
            SweepTarget::Sigm => "sigm",
        }
    }
}

impl std::str::FromStr for SweepTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi-igm" => Ok(SweepTarget::MultiIgm),
            "multi-eo" => Ok(SweepTarget::MultiEo),
            "sigm" => Ok(SweepTarget::Sigm),
            other => Err(Error::invalid(
                "target",
                format!("unknown sweep target `{other}` (multi-igm | multi-eo | sigm)"),
            )),
        }
    }
}

/// One grid point of a sweep: the threshold pair, the metric value, and the
/// grid coordinate (type or cost) attaining it.
#[derive(Debug, Clone, Copy)]
pub struct SweepRecord {
    pub beta1: f64,
    pub beta2: f64,
    pub value: f64,
    pub argmax: f64,
}

/// Sweep output: records in β₁-major, β₂-minor order plus the grid minimum.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub target: SweepTarget,
    pub records: Vec<SweepRecord>,
    pub minimum: SweepRecord,
}

fn validate_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(name));
    }
    Ok(())
}

/// Evaluates the chosen violation functional at every `(β₁, β₂)` threshold
/// pair and returns all records plus the minimum. For distinct priors the
/// minimum stays strictly positive; the reported floor is the exhibit.
///
/// Grid evaluation is parallel; the output ordering and the selected
/// minimum (first in row-major order on ties) are deterministic.
pub fn sweep_impossibility(
    scenario: &Scenario,
    grid1: &[f64],
    grid2: &[f64],
    target: SweepTarget,
) -> Result<SweepOutcome> {
    validate_grid("grid1", grid1)?;
    validate_grid("grid2", grid2)?;
    if !scenario.grading.disclose {
        return Err(Error::invalid("disclose", "sweeps audit the disclosed-grades pipeline"));
    }
    let gamma = scenario.grading.gamma;
    let ts = type_grid(&scenario.pop1, &scenario.pop2).points();
    let cs = cost_grid(&scenario.cost).points();
    let rule_of = |beta: f64| AdmissionRule::Threshold(ExtReal::Finite(beta));

    // Everything a grid point needs depends on one (group, β) only, so build
    // per-threshold tables first and scan pairs afterwards.
    let records: Vec<SweepRecord> = match target {
        SweepTarget::Sigm => {
            let densities = |pop: &PopulationPrior, grid: &[f64]| -> Result<Vec<Vec<f64>>> {
                grid.par_iter()
                    .map(|&b| {
                        let d = AdmittedTypeDensity::new(pop, &rule_of(b))?;
                        Ok(ts.iter().map(|&t| d.density_at(t)).collect())
                    })
                    .collect()
            };
            let d1 = densities(&scenario.pop1, grid1)?;
            let d2 = densities(&scenario.pop2, grid2)?;
            pair_scan(grid1, grid2, |i, j| {
                sup_abs_diff(&d1[i], &d2[j], &ts)
            })
        }
        SweepTarget::MultiIgm => {
            let gstars = |pop: &PopulationPrior, grid: &[f64]| -> Result<Vec<Vec<f64>>> {
                grid.par_iter()
                    .map(|&b| {
                        cs.iter()
                            .map(|&c| hiring_grade_threshold(pop, gamma, &rule_of(b), c))
                            .collect()
                    })
                    .collect()
            };
            let g1 = gstars(&scenario.pop1, grid1)?;
            let g2 = gstars(&scenario.pop2, grid2)?;
            pair_scan(grid1, grid2, |i, j| {
                sup_abs_diff(&g1[i], &g2[j], &cs)
            })
        }
        SweepTarget::MultiEo => {
            // Hire-probability tables, cost-major then type-minor.
            let tables = |pop: &PopulationPrior, grid: &[f64]| -> Result<Vec<Vec<f64>>> {
                grid.par_iter()
                    .map(|&b| {
                        let rule = rule_of(b);
                        let x: Vec<f64> = ts
                            .iter()
                            .map(|&t| acceptance_probability_unchecked(&rule, t))
                            .collect();
                        let mut table = Vec::with_capacity(cs.len() * ts.len());
                        for &c in &cs {
                            let g_star = hiring_grade_threshold(pop, gamma, &rule, c)?;
                            for (k, &t) in ts.iter().enumerate() {
                                table.push(x[k] * std_sf((g_star - t) / gamma));
                            }
                        }
                        Ok(table)
                    })
                    .collect()
            };
            let h1 = tables(&scenario.pop1, grid1)?;
            let h2 = tables(&scenario.pop2, grid2)?;
            let t_len = ts.len();
            pair_scan(grid1, grid2, |i, j| {
                let (mut best, mut arg) = (0.0f64, ts[0]);
                for (idx, (a, b)) in h1[i].iter().zip(h2[j].iter()).enumerate() {
                    let d = (a - b).abs();
                    if d > best {
                        best = d;
                        arg = ts[idx % t_len];
                    }
                }
                (best, arg)
            })
        }
    };

    let minimum = records
        .iter()
        .copied()
        .reduce(|best, r| if r.value < best.value { r } else { best })
        .expect("grids are non-empty");
    Ok(SweepOutcome {
        target,
        records,
        minimum,
    })
}

fn sup_abs_diff(a: &[f64], b: &[f64], coords: &[f64]) -> (f64, f64) {
    let (mut best, mut arg) = (0.0f64, coords[0]);
    for (k, (x, y)) in a.iter().zip(b.iter()).enumerate() {
        let d = (x - y).abs();
        if d > best {
            best = d;
            arg = coords[k];
        }
    }
    (best, arg)
}

fn pair_scan(
    grid1: &[f64],
    grid2: &[f64],
    eval: impl Fn(usize, usize) -> (f64, f64) + Sync,
) -> Vec<SweepRecord> {
    grid1
        .par_iter()
        .enumerate()
        .map(|(i, &b1)| {
            grid2
                .iter()
                .enumerate()
                .map(|(j, &b2)| {
                    let (value, argmax) = eval(i, j);
                    SweepRecord {
                        beta1: b1,
                        beta2: b2,
                        value,
                        argmax,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Audit of the noiseless-exam pipeline, where admission acts directly on
/// types through a common threshold.
///
/// Every admit's posterior mean is at least the admission cut for any grade,
/// so once the cut clears the audited costs the employer hires every admit
/// in both groups and all decision-level metrics vanish. Costs above the cut
/// are audited faithfully: hiring grade thresholds are recovered per group
/// and compared. The group-membership metric here is the 0/1 disagreement of
/// hire decisions over a grade grid (decision level, matching the no-grades
/// semantics).
pub fn noiseless_report(scenario: &Scenario, beta: ExtReal) -> Result<FairnessReport> {
    if beta.is_pos_inf() {
        return Err(Error::ZeroProbability("noiseless threshold at +inf admits nobody"));
    }
    let tg = type_grid(&scenario.pop1, &scenario.pop2);
    let ts = tg.points();
    let cg = cost_grid(&scenario.cost);
    let cs = cg.points();
    let gamma = scenario.grading.gamma;
    let disclose = scenario.grading.disclose;

    let admit = |t: f64| match beta {
        ExtReal::NegInf => true,
        ExtReal::Finite(b) => t >= b,
        ExtReal::PosInf => unreachable!(),
    };

    // Hiring grade threshold of group `pop` at cost `c`: -inf when every
    // grade hires (c at or below the admission cut), else the root of the
    // truncated posterior mean.
    let gstar_of = |pop: &PopulationPrior, c: f64| -> Result<ExtReal> {
        if !disclose {
            // Decision is grade-free: hire-all iff the truncated prior mean
            // clears the cost.
            let mean = truncated_mean(&pop.as_gaussian(), beta)?;
            return Ok(if mean >= c { ExtReal::NegInf } else { ExtReal::PosInf });
        }
        if let ExtReal::Finite(b) = beta {
            if c <= b {
                return Ok(ExtReal::NegInf);
            }
        }
        let e_of = |g: f64| -> Result<f64> {
            let ev = crate::calibration::noiseless_grade_evidence(pop, gamma, g);
            truncated_mean(
                &GaussianParams {
                    mean: ev.mean,
                    sd: ev.sd,
                },
                beta,
            )
        };
        let v = pop.sigma * pop.sigma;
        let g2 = gamma * gamma;
        let mut hi = ((v + g2) * c - g2 * pop.mu) / v;
        let mut f_hi = e_of(hi)? - c;
        let mut step = 1.0 + pop.sigma;
        let mut expansions = 0;
        while f_hi < 0.0 {
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Bracketing {
                    context: "noiseless g* upper bracket",
                    expansions,
                });
            }
            hi += step;
            step *= 2.0;
            f_hi = e_of(hi)? - c;
        }
        let mut step = 1.0 + pop.sigma;
        let mut lo = hi - step;
        let mut f_lo = e_of(lo)? - c;
        let mut expansions = 0;
        while f_lo >= 0.0 {
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Bracketing {
                    context: "noiseless g* lower bracket",
                    expansions,
                });
            }
            step *= 2.0;
            lo -= step;
            f_lo = e_of(lo)? - c;
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            let f_mid = e_of(mid)? - c;
            if f_mid.abs() <= 1e-10 {
                return Ok(ExtReal::Finite(mid));
            }
            if f_mid > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NonConvergence("noiseless g* bisection stalled".to_string()))
    };

    // Probability of being hired given admission, as a function of type.
    let hire_factor = |g_star: ExtReal, t: f64| -> f64 {
        match g_star {
            ExtReal::NegInf => 1.0,
            ExtReal::PosInf => 0.0,
            ExtReal::Finite(g) => std_sf((g - t) / gamma),
        }
    };

    let mut eo = 0.0f64;
    let mut eo_argmax = ts[0];
    let mut igm = 0.0f64;
    let mut igm_argmax = cs[0];
    // Grade grid for the decision-level comparison.
    let gs: Vec<f64> = GridSpec {
        lo: tg.lo - 6.0 * gamma,
        hi: tg.hi + 6.0 * gamma,
        n: T_GRID_POINTS,
    }
    .points();

    for &c in &cs {
        let g1 = gstar_of(&scenario.pop1, c)?;
        let g2 = gstar_of(&scenario.pop2, c)?;
        for &t in &ts {
            if !admit(t) {
                continue; // both groups reject identically below the cut
            }
            let d = (hire_factor(g1, t) - hire_factor(g2, t)).abs();
            if d > eo {
                eo = d;
                eo_argmax = t;
            }
        }
        if g1 != g2 {
            for &g in &gs {
                let h1 = g >= g1.to_f64();
                let h2 = g >= g2.to_f64();
                if h1 != h2 {
                    if 1.0 > igm {
                        igm = 1.0;
                        igm_argmax = c;
                    }
                    break;
                }
            }
        }
    }

    // Admitted-type densities are the priors truncated at the cut.
    let mut sigm = 0.0f64;
    let trunc_density = |pop: &PopulationPrior, t: f64| -> Result<f64> {
        if !admit(t) {
            return Ok(0.0);
        }
        let z = match beta {
            ExtReal::NegInf => return Ok(pop.as_gaussian().pdf(t)),
            ExtReal::Finite(b) => (b - pop.mu) / pop.sigma,
            ExtReal::PosInf => unreachable!(),
        };
        Ok(pop.as_gaussian().pdf(t) / std_sf(z))
    };
    for &t in &ts {
        let d = (trunc_density(&scenario.pop1, t)? - trunc_density(&scenario.pop2, t)?).abs();
        sigm = sigm.max(d);
    }

    Ok(FairnessReport {
        eo_gap: eo,
        eo_argmax,
        igm_violation: igm,
        igm_argmax,
        sigm_gap: sigm,
        t_grid: tg,
        c_grid: cg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GradingPolicy;

    fn scenario(mu1: f64, mu2: f64, disclose: bool, c: (f64, f64)) -> Scenario {
        Scenario::new(
            PopulationPrior::new(mu1, 1.0).unwrap(),
            PopulationPrior::new(mu2, 1.0).unwrap(),
            GradingPolicy::new(1.0, disclose).unwrap(),
            CostSpec::new(c.0, c.1).unwrap(),
        )
    }

    fn threshold(beta: f64) -> AdmissionRule {
        AdmissionRule::Threshold(ExtReal::Finite(beta))
    }

    #[test]
    fn hire_probability_trivial_cases() {
        let t = 0.7;
        let hp = hire_probability_given_type(1.0, &AdmissionRule::AdmitAll, t, t).unwrap();
        assert!((hp - 0.5).abs() < 1e-14);
        let hp = hire_probability_given_type(1.0, &threshold(t), t, t).unwrap();
        assert!((hp - 0.25).abs() < 1e-14);
    }

    #[test]
    fn hire_probability_product_of_tails() {
        // x(2) · (1 - Φ(1 - 2)) = Φ(2) · Φ(1)
        let hp = hire_probability_given_type(1.0, &threshold(0.0), 1.0, 2.0).unwrap();
        let expected = crate::gauss::std_cdf(2.0) * crate::gauss::std_cdf(1.0);
        assert!((hp - expected).abs() < 1e-14, "{hp} vs {expected}");
    }

    #[test]
    fn identical_setup_has_zero_gaps() {
        let s = scenario(0.0, 0.0, true, (0.5, 0.5));
        let r = fairness_report(&s, &threshold(0.3), &threshold(0.3)).unwrap();
        assert!(r.eo_gap <= 1e-12);
        assert!(r.igm_violation <= 1e-12);
        assert!(r.sigm_gap <= 1e-12);
    }

    #[test]
    fn distinct_priors_have_positive_gaps() {
        let s = scenario(0.0, -1.0, true, (0.5, 0.5));
        let r = fairness_report(&s, &threshold(0.0), &threshold(0.0)).unwrap();
        assert!(r.eo_gap > 1e-4, "eo {}", r.eo_gap);
        assert!(r.igm_violation > 1e-4, "igm {}", r.igm_violation);
        assert!(r.sigm_gap > 1e-4, "sigm {}", r.sigm_gap);
    }

    #[test]
    fn sigm_gap_positive_when_variances_differ() {
        let s = Scenario::new(
            PopulationPrior::new(0.0, 1.0).unwrap(),
            PopulationPrior::new(0.0, 2.0).unwrap(),
            GradingPolicy::new(1.0, true).unwrap(),
            CostSpec::single(0.5).unwrap(),
        );
        let g = sigm_gap(&s, &threshold(0.0), &threshold(0.0)).unwrap();
        assert!(g > 1e-4, "sigm {g}");
    }

    #[test]
    fn sweep_identical_priors_vanishes_on_diagonal() {
        let s = scenario(0.0, 0.0, true, (0.5, 0.5));
        let grid = [-1.0, 0.0, 1.0];
        let out = sweep_impossibility(&s, &grid, &grid, SweepTarget::MultiIgm).unwrap();
        assert_eq!(out.records.len(), 9);
        assert!(out.minimum.value <= 1e-12);
        assert_eq!(out.minimum.beta1, out.minimum.beta2);
        // Ordering contract: β₁ major, β₂ minor.
        assert_eq!(out.records[1].beta1, -1.0);
        assert_eq!(out.records[1].beta2, 0.0);
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let s = scenario(0.0, -1.0, true, (0.3, 0.7));
        assert!(sweep_impossibility(&s, &[], &[0.0], SweepTarget::Sigm).is_err());
        let no_grades = scenario(0.0, -1.0, false, (0.3, 0.7));
        assert!(sweep_impossibility(&no_grades, &[0.0], &[0.0], SweepTarget::Sigm).is_err());
    }

    #[test]
    fn noiseless_pipeline_is_clean_at_the_top_cut() {
        let s = scenario(0.0, -1.0, true, (0.3, 0.7));
        let r = noiseless_report(&s, ExtReal::Finite(0.7)).unwrap();
        assert!(r.eo_gap <= 1e-12, "eo {}", r.eo_gap);
        assert!(r.igm_violation <= 1e-12, "igm {}", r.igm_violation);
        // The admitted-type densities still differ; only the decisions align.
        assert!(r.sigm_gap > 0.0);
    }

    #[test]
    fn noiseless_pipeline_audits_costs_above_the_cut() {
        let s = scenario(0.0, -1.0, true, (0.3, 0.7));
        let r = noiseless_report(&s, ExtReal::Finite(0.0)).unwrap();
        // Costs in (0, 0.7] exceed the cut, so grade thresholds matter and
        // differ across groups.
        assert!(r.igm_violation > 0.0);
        assert!(r.eo_gap > 0.0);
    }
}

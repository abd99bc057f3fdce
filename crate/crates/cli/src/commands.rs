//! Subcommand implementations.

use std::path::Path;

use screening_core::audit::{fairness_report, hire_probability_given_type, sweep_impossibility, SweepTarget};
use screening_core::calibration::{
    calibrate_single_threshold_igm, eo_fixed_point_gamma1, no_grades_posterior_mean,
    no_grades_threshold, noiseless_rule,
};
use screening_core::ext::ExtReal;
use screening_core::mc::{mc_hire_rate_given_type, mc_no_grades_mean, mc_posterior_mean, McEstimate};
use screening_core::model::{AdmissionRule, Scenario};
use screening_core::posterior::{posterior_mean_threshold, PosteriorMethod, PosteriorSummary};
use screening_core::{Error as CoreError, GridSpec};

use crate::report::{sig12, write_csv, Manifest};
use crate::scenario::{parse_scenario_file, ScenarioFile};
use crate::{CalibrateMode, CliError, TargetArg};

type CmdResult = Result<u8, CliError>;

fn load(path: &Path) -> Result<ScenarioFile, CliError> {
    let parsed = parse_scenario_file(path)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(parsed)
}

fn parse_beta(raw: &str) -> Result<ExtReal, CliError> {
    raw.parse::<ExtReal>()
        .map_err(|_| CliError::Input(format!("cannot parse threshold `{raw}` (number, -inf, or +inf)")))
}

fn require_disclosed(scenario: &Scenario, what: &str) -> Result<(), CliError> {
    if !scenario.grading.disclose {
        return Err(CliError::Input(format!(
            "{what} needs a disclosed grading policy (disclose = true)"
        )));
    }
    Ok(())
}

pub fn posterior(path: &Path, group: u8, beta: &str, grade: f64, threads: &str) -> CmdResult {
    if !(group == 1 || group == 2) {
        return Err(CliError::Input(format!("--group must be 1 or 2, got {group}")));
    }
    let parsed = load(path)?;
    require_disclosed(&parsed.scenario, "posterior evaluation")?;
    let beta = parse_beta(beta)?;
    let prior = parsed.scenario.prior(group as usize);
    let gamma = parsed.scenario.grading.gamma;

    let rule = AdmissionRule::Threshold(beta);
    let closed =
        PosteriorSummary::compute(prior, gamma, &rule, grade, PosteriorMethod::ClosedForm)?.mean;
    let quadrature =
        PosteriorSummary::compute(prior, gamma, &rule, grade, PosteriorMethod::Quadrature)?.mean;

    Manifest {
        subcommand: "posterior",
        scenario: path.display().to_string(),
        params: vec![
            ("group".into(), group.to_string()),
            ("beta".into(), beta.to_string()),
            ("grade".into(), sig12(grade)),
        ],
        seed: None,
        out: None,
        threads: threads.to_string(),
    }
    .print();
    println!("closed_form = {}", sig12(closed));
    println!("quadrature  = {}", sig12(quadrature));
    println!("difference  = {}", sig12(closed - quadrature));
    Ok(0)
}

pub fn calibrate(path: &Path, mode: CalibrateMode, threads: &str) -> CmdResult {
    let parsed = load(path)?;
    let scenario = &parsed.scenario;
    let mode_name = match mode {
        CalibrateMode::Igm => "igm",
        CalibrateMode::NoGrades => "no-grades",
        CalibrateMode::Noiseless => "noiseless",
        CalibrateMode::EoGamma1 => "eo-gamma1",
    };
    let manifest = Manifest {
        subcommand: "calibrate",
        scenario: path.display().to_string(),
        params: vec![("mode".into(), mode_name.into())],
        seed: None,
        out: None,
        threads: threads.to_string(),
    };

    match mode {
        CalibrateMode::Igm => {
            let r = calibrate_single_threshold_igm(scenario)?;
            manifest.print();
            println!("beta1 = {}", sig12(r.beta1));
            println!("beta2 = {}", sig12(r.beta2));
            println!("g_star = {}", sig12(r.g_star.expect("igm mode always produces g*")));
            println!("residual1 = {}", sig12(r.residual1));
            println!("residual2 = {}", sig12(r.residual2));
            println!("converged = {}", r.converged);
            Ok(if r.converged { 0 } else { 3 })
        }
        CalibrateMode::NoGrades => {
            if scenario.grading.disclose {
                return Err(CliError::Input(
                    "no-grades calibration requires disclose = false in the scenario".into(),
                ));
            }
            let beta = no_grades_threshold(scenario)?;
            let mean1 = no_grades_posterior_mean(&scenario.pop1, beta)?;
            let mean2 = no_grades_posterior_mean(&scenario.pop2, beta)?;
            manifest.print();
            match beta {
                ExtReal::Finite(b) => println!("beta = {}", sig12(b)),
                other => println!("beta = {other}"),
            }
            println!("mean1 = {}", sig12(mean1));
            println!("mean2 = {}", sig12(mean2));
            println!("target = {}", sig12(scenario.cost.c_max));
            Ok(0)
        }
        CalibrateMode::Noiseless => {
            let rule = noiseless_rule(&scenario.cost);
            let AdmissionRule::Threshold(ExtReal::Finite(beta)) = rule else {
                unreachable!("noiseless rule is a finite threshold");
            };
            manifest.print();
            println!("rule = threshold");
            println!("beta = {}", sig12(beta));
            Ok(0)
        }
        CalibrateMode::EoGamma1 => {
            let r = eo_fixed_point_gamma1(scenario)?;
            manifest.print();
            println!("beta1 = {}", sig12(r.beta1));
            println!("beta2 = {}", sig12(r.beta2));
            println!("residual1 = {}", sig12(r.residual1));
            println!("residual2 = {}", sig12(r.residual2));
            println!(
                "eo_gap = {}",
                sig12(r.eo_residual.expect("γ = 1 solver always measures the gap"))
            );
            println!("iterations = {}", r.trajectory.len());
            println!("converged = {}", r.converged);
            if !r.converged {
                for (i, step) in r.trajectory.iter().rev().take(5).rev().enumerate() {
                    println!(
                        "trajectory[-{}] = beta1 {} beta2 {} residuals ({}, {})",
                        5 - i,
                        sig12(step.beta1),
                        sig12(step.beta2),
                        sig12(step.residual1),
                        sig12(step.residual2),
                    );
                }
            }
            Ok(if r.converged { 0 } else { 3 })
        }
    }
}

pub fn audit(
    path: &Path,
    beta1: Option<&str>,
    beta2: Option<&str>,
    csv: Option<&Path>,
    threads: &str,
) -> CmdResult {
    let parsed = load(path)?;
    let rule1 = match beta1 {
        Some(raw) => AdmissionRule::Threshold(parse_beta(raw)?),
        None => parsed.rule1.clone(),
    };
    let rule2 = match beta2 {
        Some(raw) => AdmissionRule::Threshold(parse_beta(raw)?),
        None => parsed.rule2.clone(),
    };
    let report = fairness_report(&parsed.scenario, &rule1, &rule2)?;

    let manifest = Manifest {
        subcommand: "audit",
        scenario: path.display().to_string(),
        params: vec![
            ("rule1".into(), format!("{rule1:?}")),
            ("rule2".into(), format!("{rule2:?}")),
        ],
        seed: None,
        out: csv.map(|p| p.display().to_string()),
        threads: threads.to_string(),
    };
    manifest.print();
    println!("eo_gap = {}", sig12(report.eo_gap));
    println!("eo_argmax_t = {}", sig12(report.eo_argmax));
    println!("igm_violation = {}", sig12(report.igm_violation));
    println!("igm_argmax_c = {}", sig12(report.igm_argmax));
    println!("sigm_gap = {}", sig12(report.sigm_gap));
    println!(
        "t_grid = [{}, {}] x {}",
        sig12(report.t_grid.lo),
        sig12(report.t_grid.hi),
        report.t_grid.n
    );
    println!(
        "c_grid = [{}, {}] x {}",
        sig12(report.c_grid.lo),
        sig12(report.c_grid.hi),
        report.c_grid.n
    );

    if let Some(csv_path) = csv {
        let rows = vec![
            format!("eo_gap,{},{}", sig12(report.eo_gap), sig12(report.eo_argmax)),
            format!(
                "igm_violation,{},{}",
                sig12(report.igm_violation),
                sig12(report.igm_argmax)
            ),
            format!("sigm_gap,{},", sig12(report.sigm_gap)),
        ];
        write_csv(csv_path, &manifest, "metric,value,argmax", rows.into_iter())?;
    }
    Ok(0)
}

fn parse_grid(raw: &str, name: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!("{name} must be lo:hi:n, got `{raw}`")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Input(format!("{name}: bad lo `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Input(format!("{name}: bad hi `{}`", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Input(format!("{name}: bad n `{}`", parts[2])))?;
    let spec = GridSpec::new(lo, hi, n).map_err(CliError::Core)?;
    Ok(spec.points())
}

pub fn sweep(
    path: &Path,
    target: TargetArg,
    grid1: &str,
    grid2: &str,
    out: &Path,
    threads: &str,
) -> CmdResult {
    let parsed = load(path)?;
    let target = match target {
        TargetArg::MultiIgm => SweepTarget::MultiIgm,
        TargetArg::MultiEo => SweepTarget::MultiEo,
        TargetArg::Sigm => SweepTarget::Sigm,
    };
    let g1 = parse_grid(grid1, "--grid1")?;
    let g2 = parse_grid(grid2, "--grid2")?;
    let outcome = sweep_impossibility(&parsed.scenario, &g1, &g2, target)?;

    let manifest = Manifest {
        subcommand: "sweep",
        scenario: path.display().to_string(),
        params: vec![
            ("target".into(), target.name().into()),
            ("grid1".into(), grid1.into()),
            ("grid2".into(), grid2.into()),
        ],
        seed: None,
        out: Some(out.display().to_string()),
        threads: threads.to_string(),
    };
    let metric = target.name();
    write_csv(
        out,
        &manifest,
        "beta1,beta2,metric,value,argmax",
        outcome.records.iter().map(|r| {
            format!(
                "{},{},{metric},{},{}",
                sig12(r.beta1),
                sig12(r.beta2),
                sig12(r.value),
                sig12(r.argmax)
            )
        }),
    )?;

    manifest.print();
    println!("rows = {}", outcome.records.len());
    println!("minimum = {}", sig12(outcome.minimum.value));
    println!("argmin_beta1 = {}", sig12(outcome.minimum.beta1));
    println!("argmin_beta2 = {}", sig12(outcome.minimum.beta2));
    println!("argmax_at_min = {}", sig12(outcome.minimum.argmax));
    Ok(0)
}

struct CheckRow {
    name: &'static str,
    closed: f64,
    estimate: Result<McEstimate, CoreError>,
}

pub fn mc_check(path: &Path, samples: u64, seed: u64, threads: &str) -> CmdResult {
    if samples < screening_core::mc::MIN_SAMPLES {
        return Err(CliError::Input(format!(
            "--samples must be at least {}, got {samples}",
            screening_core::mc::MIN_SAMPLES
        )));
    }
    let parsed = load(path)?;
    let scenario = &parsed.scenario;
    require_disclosed(scenario, "mc-check")?;
    let gamma = scenario.grading.gamma;
    let thr0 = AdmissionRule::Threshold(ExtReal::Finite(0.0));

    let rows = vec![
        CheckRow {
            name: "posterior_mean_g1_b0_g0",
            closed: posterior_mean_threshold(&scenario.pop1, gamma, ExtReal::Finite(0.0), 0.0)?,
            estimate: mc_posterior_mean(&scenario.pop1, gamma, &thr0, 0.0, 0.02, samples, seed),
        },
        CheckRow {
            name: "posterior_mean_g2_b0_g0",
            closed: posterior_mean_threshold(&scenario.pop2, gamma, ExtReal::Finite(0.0), 0.0)?,
            estimate: mc_posterior_mean(
                &scenario.pop2,
                gamma,
                &thr0,
                0.0,
                0.02,
                samples,
                seed.wrapping_add(1),
            ),
        },
        CheckRow {
            name: "no_grades_mean_g1_b0",
            closed: no_grades_posterior_mean(&scenario.pop1, ExtReal::Finite(0.0))?,
            estimate: mc_no_grades_mean(
                &scenario.pop1,
                ExtReal::Finite(0.0),
                samples,
                seed.wrapping_add(2),
            ),
        },
        CheckRow {
            name: "no_grades_mean_g2_b0",
            closed: no_grades_posterior_mean(&scenario.pop2, ExtReal::Finite(0.0))?,
            estimate: mc_no_grades_mean(
                &scenario.pop2,
                ExtReal::Finite(0.0),
                samples,
                seed.wrapping_add(3),
            ),
        },
        CheckRow {
            name: "hire_rate_thr0_gstar1_t2",
            closed: hire_probability_given_type(gamma, &thr0, 1.0, 2.0)?,
            estimate: mc_hire_rate_given_type(gamma, &thr0, 1.0, 2.0, samples, seed.wrapping_add(4)),
        },
        CheckRow {
            name: "hire_rate_admit_all_gstar_t",
            closed: hire_probability_given_type(gamma, &AdmissionRule::AdmitAll, 0.0, 0.0)?,
            estimate: mc_hire_rate_given_type(
                gamma,
                &AdmissionRule::AdmitAll,
                0.0,
                0.0,
                samples,
                seed.wrapping_add(5),
            ),
        },
    ];

    Manifest {
        subcommand: "mc-check",
        scenario: path.display().to_string(),
        params: vec![("samples".into(), samples.to_string())],
        seed: Some(seed),
        out: None,
        threads: threads.to_string(),
    }
    .print();

    println!(
        "{:<28} {:>18} {:>18} {:>12} {:>8}  result",
        "check", "closed", "mc", "stderr", "z"
    );
    let mut all_pass = true;
    for row in rows {
        match row.estimate {
            Ok(est) => {
                let z = if est.stderr > 0.0 {
                    (row.closed - est.value).abs() / est.stderr
                } else if row.closed == est.value {
                    0.0
                } else {
                    f64::INFINITY
                };
                let pass = z <= 3.0;
                all_pass &= pass;
                println!(
                    "{:<28} {:>18} {:>18} {:>12} {:>8.2}  {}",
                    row.name,
                    sig12(row.closed),
                    sig12(est.value),
                    format!("{:.3e}", est.stderr),
                    z,
                    if pass { "PASS" } else { "FAIL" }
                );
            }
            Err(CoreError::UnderSampled { accepted, required }) => {
                all_pass = false;
                println!(
                    "{:<28} {:>18} {:>18} {:>12} {:>8}  UNDERSAMPLED ({accepted}/{required})",
                    row.name,
                    sig12(row.closed),
                    "-",
                    "-",
                    "-"
                );
            }
            Err(e) => return Err(e.into()),
        }
    }
    println!("all_pass = {all_pass}");
    Ok(if all_pass { 0 } else { 1 })
}

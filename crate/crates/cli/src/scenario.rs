//! Scenario file parsing.
//!
//! A flat key/value document with dotted paths; `#` starts a comment. The
//! field names are a stable contract:
//!
//! ```text
//! pop1.mu = 0.0
//! pop1.sigma = 1.0
//! pop2.mu = -1.0
//! pop2.sigma = 1.0
//! gamma = 1.0
//! disclose = true
//! cost.min = 0.5
//! cost.max = 0.5
//! rule1.kind = threshold        # threshold | step | admit-all | admit-none
//! rule1.beta = 0.0              # threshold only; -inf / +inf accepted
//! rule2.kind = step
//! rule2.knots = 0:0.5, 1:1.0    # step only; score:probability pairs
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use screening_core::ext::ExtReal;
use screening_core::model::{AdmissionRule, CostSpec, GradingPolicy, PopulationPrior, Scenario};

#[derive(Debug)]
pub enum ParseError {
    Io(String, std::io::Error),
    Line { line: usize, reason: String },
    Field { field: String, reason: String },
    Missing(String),
    Unknown(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Io(path, e) => write!(f, "cannot read scenario `{path}`: {e}"),
            ParseError::Line { line, reason } => write!(f, "scenario line {line}: {reason}"),
            ParseError::Field { field, reason } => write!(f, "scenario field `{field}`: {reason}"),
            ParseError::Missing(field) => write!(f, "scenario is missing field `{field}`"),
            ParseError::Unknown(field) => write!(f, "unknown scenario field `{field}`"),
        }
    }
}

impl std::error::Error for ParseError {}

/// A parsed scenario plus the two admission rules and any validation notes.
#[derive(Debug)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub rule1: AdmissionRule,
    pub rule2: AdmissionRule,
    pub warnings: Vec<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "pop1.mu",
    "pop1.sigma",
    "pop2.mu",
    "pop2.sigma",
    "gamma",
    "disclose",
    "cost.min",
    "cost.max",
    "rule1.kind",
    "rule1.beta",
    "rule1.knots",
    "rule2.kind",
    "rule2.beta",
    "rule2.knots",
];

pub fn parse_scenario_file(path: &Path) -> Result<ScenarioFile, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::Io(path.display().to_string(), e))?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<ScenarioFile, ParseError> {
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::Line {
                line: idx + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ParseError::Unknown(key));
        }
        if fields.insert(key.clone(), value).is_some() {
            return Err(ParseError::Field {
                field: key,
                reason: "duplicate assignment".to_string(),
            });
        }
    }

    let take = |fields: &BTreeMap<String, String>, key: &str| -> Result<String, ParseError> {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| ParseError::Missing(key.to_string()))
    };
    let real = |key: &str| -> Result<f64, ParseError> {
        let raw = take(&fields, key)?;
        raw.parse::<f64>().map_err(|_| ParseError::Field {
            field: key.to_string(),
            reason: format!("expected a number, got `{raw}`"),
        })
    };
    let flag = |key: &str| -> Result<bool, ParseError> {
        let raw = take(&fields, key)?;
        match raw.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(ParseError::Field {
                field: key.to_string(),
                reason: format!("expected true/false, got `{other}`"),
            }),
        }
    };
    let field_err = |key: &str, reason: String| ParseError::Field {
        field: key.to_string(),
        reason,
    };

    let pop1 = PopulationPrior::new(real("pop1.mu")?, real("pop1.sigma")?)
        .map_err(|e| field_err("pop1", e.to_string()))?;
    let pop2 = PopulationPrior::new(real("pop2.mu")?, real("pop2.sigma")?)
        .map_err(|e| field_err("pop2", e.to_string()))?;
    let grading = GradingPolicy::new(real("gamma")?, flag("disclose")?)
        .map_err(|e| field_err("gamma", e.to_string()))?;
    let cost = CostSpec::new(real("cost.min")?, real("cost.max")?)
        .map_err(|e| field_err("cost", e.to_string()))?;

    let rule = |n: usize| -> Result<AdmissionRule, ParseError> {
        let kind_key = format!("rule{n}.kind");
        let beta_key = format!("rule{n}.beta");
        let knots_key = format!("rule{n}.knots");
        let kind = take(&fields, &kind_key)?;
        let reject_extra = |key: &str| -> Result<(), ParseError> {
            if fields.contains_key(key) {
                Err(field_err(
                    key,
                    format!("not valid for kind `{kind}`"),
                ))
            } else {
                Ok(())
            }
        };
        match kind.as_str() {
            "threshold" => {
                reject_extra(&knots_key)?;
                let raw = take(&fields, &beta_key)?;
                let beta: ExtReal = raw
                    .parse()
                    .map_err(|_| field_err(&beta_key, format!("expected number or ±inf, got `{raw}`")))?;
                Ok(AdmissionRule::Threshold(beta))
            }
            "step" => {
                reject_extra(&beta_key)?;
                let raw = take(&fields, &knots_key)?;
                let mut knots = Vec::new();
                for piece in raw.split(',') {
                    let piece = piece.trim();
                    let Some((s, p)) = piece.split_once(':') else {
                        return Err(field_err(
                            &knots_key,
                            format!("expected score:probability, got `{piece}`"),
                        ));
                    };
                    let score: f64 = s.trim().parse().map_err(|_| {
                        field_err(&knots_key, format!("bad score `{}`", s.trim()))
                    })?;
                    let prob: f64 = p.trim().parse().map_err(|_| {
                        field_err(&knots_key, format!("bad probability `{}`", p.trim()))
                    })?;
                    knots.push((score, prob));
                }
                AdmissionRule::step(knots).map_err(|e| field_err(&knots_key, e.to_string()))
            }
            "admit-all" => {
                reject_extra(&beta_key)?;
                reject_extra(&knots_key)?;
                Ok(AdmissionRule::AdmitAll)
            }
            "admit-none" => {
                reject_extra(&beta_key)?;
                reject_extra(&knots_key)?;
                Ok(AdmissionRule::AdmitNone)
            }
            other => Err(field_err(
                &kind_key,
                format!("unknown kind `{other}` (threshold | step | admit-all | admit-none)"),
            )),
        }
    };

    let rule1 = rule(1)?;
    let rule2 = rule(2)?;
    let scenario = Scenario::new(pop1, pop2, grading, cost);
    let warnings = scenario.warnings();
    Ok(ScenarioFile {
        scenario,
        rule1,
        rule2,
        warnings,
    })
}

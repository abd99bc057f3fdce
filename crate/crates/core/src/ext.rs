//! Extended real numbers for open-ended thresholds.
//!
//! Infinite thresholds are carried as explicit sentinels rather than IEEE
//! infinities so that formulas can special-case them (the hazard term is
//! dropped, never evaluated at an infinite argument).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A real number extended with `-inf` / `+inf` sentinels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wraps a finite value, rejecting NaN and IEEE infinities.
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(ExtReal::Finite(v))
        } else {
            Err(Error::NonFinite("ExtReal::finite"))
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    /// The finite payload, if any.
    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lossy conversion for comparisons and display; sentinels map onto the
    /// IEEE infinities. Never feed the result back into a formula.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" => Ok(ExtReal::NegInf),
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::invalid("ExtReal", format!("cannot parse `{other}`")))?;
                ExtReal::finite(v)
            }
        }
    }
}

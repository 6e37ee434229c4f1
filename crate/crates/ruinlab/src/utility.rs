//! Concave per-period utility functions.
//!
//! Four parameterizations are supported: square root, natural log, and the
//! isoelastic family in its shifted form `(c^(1-lambda) - 1) / (1 - lambda)`
//! and unshifted form `c^(1-lambda) / (1 - lambda)`. The two isoelastic
//! forms differ by the constant `1/(lambda - 1)`, which is irrelevant for
//! optimization but changes the sign of split-gain comparisons, so both are
//! kept explicit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityFunction {
    Sqrt,
    Log,
    IsoelasticShifted { lambda: f64 },
    IsoelasticUnshifted { lambda: f64 },
}

impl UtilityFunction {
    /// Validated constructor for the shifted isoelastic form.
    pub fn isoelastic_shifted(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::IsoelasticShifted { lambda })
    }

    /// Validated constructor for the unshifted isoelastic form.
    pub fn isoelastic_unshifted(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::IsoelasticUnshifted { lambda })
    }

    /// Evaluates u(c).
    ///
    /// c = 0 is allowed only where the formula stays finite: sqrt gives 0,
    /// unshifted isoelastic with lambda < 1 gives 0, shifted isoelastic with
    /// lambda < 1 gives -1/(1-lambda). Log and isoelastic with lambda > 1
    /// diverge at 0 and report an explicit error instead of a sentinel.
    pub fn eval(&self, c: f64) -> Result<f64> {
        if c < 0.0 {
            return Err(Error::Domain(format!(
                "consumption must be non-negative, got {c}"
            )));
        }
        if c == 0.0 {
            return match self {
                Self::Sqrt => Ok(0.0),
                Self::Log => Err(Error::Divergence("log utility at c = 0".into())),
                Self::IsoelasticShifted { lambda } if *lambda < 1.0 => Ok(-1.0 / (1.0 - lambda)),
                Self::IsoelasticUnshifted { lambda } if *lambda < 1.0 => Ok(0.0),
                Self::IsoelasticShifted { lambda } | Self::IsoelasticUnshifted { lambda } => {
                    Err(Error::Divergence(format!(
                        "isoelastic utility with lambda = {lambda} at c = 0"
                    )))
                }
            };
        }
        Ok(self.eval_unchecked(c))
    }

    /// Evaluates u(c) assuming c > 0 (or c = 0 where finite).
    ///
    /// Used in solver hot loops where feasibility is enforced upstream.
    pub fn eval_unchecked(&self, c: f64) -> f64 {
        match self {
            Self::Sqrt => c.sqrt(),
            Self::Log => c.ln(),
            Self::IsoelasticShifted { lambda } => {
                (c.powf(1.0 - lambda) - 1.0) / (1.0 - lambda)
            }
            Self::IsoelasticUnshifted { lambda } => c.powf(1.0 - lambda) / (1.0 - lambda),
        }
    }

    /// Inverts the utility: returns c with u(c) = v.
    ///
    /// Errors if v lies outside the range of u.
    pub fn invert(&self, v: f64) -> Result<f64> {
        match self {
            Self::Sqrt => {
                if v < 0.0 {
                    Err(Error::Domain(format!("sqrt utility never reaches {v}")))
                } else {
                    Ok(v * v)
                }
            }
            Self::Log => Ok(v.exp()),
            Self::IsoelasticShifted { lambda } => {
                let base = 1.0 + (1.0 - lambda) * v;
                invert_power(base, *lambda, v)
            }
            Self::IsoelasticUnshifted { lambda } => {
                let base = (1.0 - lambda) * v;
                invert_power(base, *lambda, v)
            }
        }
    }

    /// First derivative u'(c), defined for c > 0.
    pub fn marginal(&self, c: f64) -> Result<f64> {
        if c <= 0.0 {
            return Err(Error::Domain(format!(
                "marginal utility requires c > 0, got {c}"
            )));
        }
        Ok(match self {
            Self::Sqrt => 0.5 / c.sqrt(),
            Self::Log => 1.0 / c,
            Self::IsoelasticShifted { lambda } | Self::IsoelasticUnshifted { lambda } => {
                c.powf(-lambda)
            }
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if lambda == 1.0 {
        return Err(Error::Domain(
            "lambda = 1 is excluded for the isoelastic family (use log)".into(),
        ));
    }
    Ok(())
}

/// Solves c^(1-lambda) = base for c, rejecting values outside the range.
fn invert_power(base: f64, lambda: f64, v: f64) -> Result<f64> {
    // lambda < 1: range needs base >= 0. lambda > 1: c^(1-lambda) > 0.
    if base < 0.0 || (lambda > 1.0 && base <= 0.0) {
        return Err(Error::Domain(format!(
            "{v} is outside the range of the isoelastic utility (lambda = {lambda})"
        )));
    }
    Ok(base.powf(1.0 / (1.0 - lambda)))
}

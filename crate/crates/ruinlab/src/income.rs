//! Stochastic income and subsistence-expenditure processes.
//!
//! Lognormal processes are parameterized by the target mean and standard
//! deviation of the *level* (the figures reported in household statistics are
//! level moments); the log-space parameters are derived internally.

use rand_distr::{Distribution, LogNormal, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Per-period income driver.
#[derive(Debug, Clone, PartialEq)]
pub enum IncomeProcess {
    /// Degenerate distribution: every draw equals `mean`.
    Constant { mean: f64 },
    /// Lognormal level with the given level mean and std.
    Lognormal { mean: f64, std: f64 },
    /// Uniform on `[mean - half_width, mean + half_width]`.
    BoundedUniform { mean: f64, half_width: f64 },
    /// Deterministic schedule; periods past the end repeat the last value.
    FixedSequence { values: Vec<f64> },
    /// Two-phase adversarial schedule: income 1 for the first k/2 periods,
    /// then a level x drawn once per agent uniformly from [0, 1].
    LookaheadPhases { k: usize },
}

impl IncomeProcess {
    pub fn constant(mean: f64) -> Result<Self> {
        non_negative(mean, "constant income mean")?;
        Ok(Self::Constant { mean })
    }

    pub fn lognormal(mean: f64, std: f64) -> Result<Self> {
        if mean <= 0.0 {
            return Err(Error::Config(format!(
                "lognormal level mean must be positive, got {mean}"
            )));
        }
        if std < 0.0 {
            return Err(Error::Config(format!(
                "lognormal level std must be non-negative, got {std}"
            )));
        }
        Ok(Self::Lognormal { mean, std })
    }

    pub fn bounded_uniform(mean: f64, half_width: f64) -> Result<Self> {
        if half_width < 0.0 {
            return Err(Error::Config(format!(
                "half width must be non-negative, got {half_width}"
            )));
        }
        if mean - half_width < 0.0 {
            return Err(Error::Config(format!(
                "support [{}, {}] reaches below zero",
                mean - half_width,
                mean + half_width
            )));
        }
        Ok(Self::BoundedUniform { mean, half_width })
    }

    pub fn fixed_sequence(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("fixed income sequence is empty".into()));
        }
        for &v in &values {
            non_negative(v, "fixed income entry")?;
        }
        Ok(Self::FixedSequence { values })
    }

    pub fn lookahead_phases(k: usize) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return Err(Error::Config(format!(
                "lookahead instance length must be even and at least 2, got {k}"
            )));
        }
        Ok(Self::LookaheadPhases { k })
    }

    /// Mean of the per-period level.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Constant { mean }
            | Self::Lognormal { mean, .. }
            | Self::BoundedUniform { mean, .. } => *mean,
            Self::FixedSequence { values } => {
                values.iter().sum::<f64>() / values.len() as f64
            }
            // First half pays 1, second half pays E[x] = 1/2.
            Self::LookaheadPhases { .. } => 0.75,
        }
    }

    /// One draw from the time-invariant distribution (t = 0 semantics).
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        self.sampler().draw(0, rng)
    }

    /// Per-trajectory sampler carrying the state a single agent needs
    /// (currently just the lazily drawn phase level x).
    pub fn sampler(&self) -> IncomeSampler<'_> {
        IncomeSampler {
            process: self,
            phase_level: None,
        }
    }

    /// Equally weighted quantile nodes used for the solver's income
    /// expectation. Midpoint probabilities (i + 1/2)/n keep the node set
    /// deterministic and symmetric.
    pub fn quantile_nodes(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Config("need at least one income node".into()));
        }
        match self {
            Self::Constant { mean } => Ok(vec![*mean]),
            Self::BoundedUniform { mean, half_width } => Ok((0..n)
                .map(|i| {
                    let p = (i as f64 + 0.5) / n as f64;
                    mean - half_width + 2.0 * half_width * p
                })
                .collect()),
            Self::Lognormal { mean, std } => {
                let (mu, sigma) = lognormal_log_params(*mean, *std);
                Ok((0..n)
                    .map(|i| {
                        let p = (i as f64 + 0.5) / n as f64;
                        (mu + sigma * inverse_normal_cdf(p)).exp()
                    })
                    .collect())
            }
            Self::FixedSequence { .. } | Self::LookaheadPhases { .. } => Err(Error::Config(
                "income process has no stationary distribution to discretize".into(),
            )),
        }
    }
}

/// Stateful view of an income process for one trajectory.
#[derive(Debug, Clone)]
pub struct IncomeSampler<'a> {
    process: &'a IncomeProcess,
    phase_level: Option<f64>,
}

impl IncomeSampler<'_> {
    /// Draws the period-`t` income. Draws are non-negative by construction.
    pub fn draw(&mut self, t: usize, rng: &mut RngStream) -> f64 {
        match self.process {
            IncomeProcess::Constant { mean } => *mean,
            IncomeProcess::Lognormal { mean, std } => {
                if *std == 0.0 {
                    return *mean;
                }
                let (mu, sigma) = lognormal_log_params(*mean, *std);
                LogNormal::new(mu, sigma)
                    .expect("validated parameters")
                    .sample(rng)
            }
            IncomeProcess::BoundedUniform { mean, half_width } => {
                mean - half_width + 2.0 * half_width * rng.uniform()
            }
            IncomeProcess::FixedSequence { values } => values
                .get(t)
                .copied()
                .unwrap_or_else(|| *values.last().expect("non-empty")),
            IncomeProcess::LookaheadPhases { k } => {
                let x = *self.phase_level.get_or_insert_with(|| rng.uniform());
                if t < k / 2 {
                    1.0
                } else {
                    x
                }
            }
        }
    }
}

/// Per-period subsistence (expenditure floor) driver.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsistenceProcess {
    Constant { mean: f64 },
    BoundedUniform { mean: f64, half_width: f64 },
    /// Lognormal level floor; used by the calibrated cohort presets, which
    /// only pin the mean of the expenditure distribution.
    Lognormal { mean: f64, std: f64 },
}

impl SubsistenceProcess {
    pub fn constant(mean: f64) -> Result<Self> {
        non_negative(mean, "subsistence mean")?;
        Ok(Self::Constant { mean })
    }

    pub fn bounded_uniform(mean: f64, half_width: f64) -> Result<Self> {
        if half_width < 0.0 || mean - half_width < 0.0 {
            return Err(Error::Config(format!(
                "subsistence support [{}, {}] is invalid",
                mean - half_width,
                mean + half_width
            )));
        }
        Ok(Self::BoundedUniform { mean, half_width })
    }

    pub fn lognormal(mean: f64, std: f64) -> Result<Self> {
        if mean <= 0.0 || std < 0.0 {
            return Err(Error::Config(format!(
                "lognormal subsistence needs positive mean and non-negative std, got ({mean}, {std})"
            )));
        }
        Ok(Self::Lognormal { mean, std })
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Constant { mean }
            | Self::BoundedUniform { mean, .. }
            | Self::Lognormal { mean, .. } => *mean,
        }
    }

    /// Half-width of the support; zero for the constant kind, none for the
    /// unbounded lognormal kind.
    pub fn half_width(&self) -> Option<f64> {
        match self {
            Self::Constant { .. } => Some(0.0),
            Self::BoundedUniform { half_width, .. } => Some(*half_width),
            Self::Lognormal { .. } => None,
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            Self::Constant { mean } => *mean,
            Self::BoundedUniform { mean, half_width } => {
                mean - half_width + 2.0 * half_width * rng.uniform()
            }
            Self::Lognormal { mean, std } => {
                if *std == 0.0 {
                    return *mean;
                }
                let (mu, sigma) = lognormal_log_params(*mean, *std);
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
        }
    }
}

/// Converts level mean/std to log-space (mu, sigma).
pub fn lognormal_log_params(mean: f64, std: f64) -> (f64, f64) {
    let m2 = mean * mean;
    let mu = (m2 / (m2 + std * std).sqrt()).ln();
    let sigma = (1.0 + (std * std) / m2).ln().sqrt();
    (mu, sigma)
}

/// Inverse standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 on (0, 1)).
#[allow(clippy::excessive_precision)] // published coefficients, kept verbatim
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability must be in (0, 1), got {p}");

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

fn non_negative(v: f64, what: &str) -> Result<()> {
    if v < 0.0 {
        Err(Error::Config(format!("{what} must be non-negative, got {v}")))
    } else {
        Ok(())
    }
}

//! Asset dynamics, ruin detection, and discounted-utility accounting.

use crate::error::{Error, Result};
use crate::utility::UtilityFunction;

/// Model-level parameters shared by the solver and the simulators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Discount factor, strictly inside (0, 1).
    pub beta: f64,
    /// Gross return on savings per period.
    pub return_rate: f64,
    /// Assets at t = 0.
    pub initial_assets: f64,
}

impl ModelParams {
    pub fn new(beta: f64, return_rate: f64, initial_assets: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config(format!(
                "discount factor must lie in (0, 1), got {beta}"
            )));
        }
        if return_rate < 0.0 {
            return Err(Error::Config(format!(
                "return rate must be non-negative, got {return_rate}"
            )));
        }
        if initial_assets < 0.0 {
            return Err(Error::Config(format!(
                "initial assets must be non-negative, got {initial_assets}"
            )));
        }
        Ok(Self {
            beta,
            return_rate,
            initial_assets,
        })
    }
}

/// One step of the asset recurrence.
///
/// Fixed floating-point operation order (subtract, multiply, add) so that
/// trajectories are bit-reproducible across platforms and schedules.
#[inline]
pub fn step_assets(assets: f64, consumption: f64, return_rate: f64, income: f64) -> f64 {
    return_rate * (assets - consumption) + income
}

/// First index t whose successor asset level is non-positive, if any.
///
/// `a[t + 1] <= 0` counts as ruin, including exact zero.
pub fn detect_ruin(assets: &[f64]) -> Option<usize> {
    assets.windows(2).position(|w| w[1] <= 0.0)
}

/// Sum of beta^t * u(c_t) over a finite consumption series.
pub fn discounted_utility(
    consumption: &[f64],
    beta: f64,
    utility: &UtilityFunction,
) -> Result<f64> {
    let mut total = 0.0;
    let mut weight = 1.0;
    for &c in consumption {
        total += weight * utility.eval(c)?;
        weight *= beta;
    }
    Ok(total)
}

/// Per-agent record of one simulated path.
///
/// `assets` always has exactly one more entry than `consumption` and
/// `income`; `ruin_time`, when present, is the first t with a[t + 1] <= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub assets: Vec<f64>,
    pub consumption: Vec<f64>,
    pub income: Vec<f64>,
    pub ruin_time: Option<usize>,
}

impl Trajectory {
    /// Starts a trajectory at the given initial asset level.
    pub fn new(initial_assets: f64) -> Self {
        Self {
            assets: vec![initial_assets],
            consumption: Vec::new(),
            income: Vec::new(),
            ruin_time: None,
        }
    }

    pub fn len(&self) -> usize {
        self.consumption.len()
    }

    pub fn is_empty(&self) -> bool {
        self.consumption.is_empty()
    }

    /// Records one period and returns the new asset level.
    pub fn push_period(&mut self, consumption: f64, return_rate: f64, income: f64) -> f64 {
        let a = *self.assets.last().expect("assets never empty");
        let next = step_assets(a, consumption, return_rate, income);
        self.consumption.push(consumption);
        self.income.push(income);
        self.assets.push(next);
        if self.ruin_time.is_none() && next <= 0.0 {
            self.ruin_time = Some(self.assets.len() - 2);
        }
        next
    }
}

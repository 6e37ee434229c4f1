//! Analytic probes and bound calculators for constrained-agency regimes.
//!
//! Covers the utility cap and consume-all threshold for fixed obligatory
//! consumption, the exponential ruin bound for binding impulsive floors,
//! the two terminal-consumption improvement constructions, and the
//! isoelastic split point with its gain probe.

use crate::dynamics::{detect_ruin, ModelParams, Trajectory};
use crate::error::{Error, Result};
use crate::income::IncomeProcess;
use crate::rng::RngStream;
use crate::utility::UtilityFunction;

/// Whether exhausting assets beats any fixed-consumption infinite plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// a0 exceeds the consume-all threshold: finite-horizon exhaustion wins.
    ConsumeAllPreferred,
    /// The Jensen cap still binds; a0 is at or below the threshold.
    CapBinding,
}

/// Outcome of the fixed-obligatory-consumption probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObligatoryVerdict {
    /// Upper bound u(Y)/(1 - beta) on expected infinite-horizon utility.
    pub cap: f64,
    /// Consume-all threshold u^-1(cap) on initial assets.
    pub threshold: f64,
    pub a0: f64,
    pub verdict: Verdict,
}

/// Exponential ruin bound for a binding stochastic floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingReport {
    /// Mean drift B - Y of expenditure over income.
    pub drift: f64,
    /// Decay rate c = (B - Y)^2 / (8 (delta + epsilon)^2).
    pub rate: f64,
    /// Smallest horizon 2 a0 / (B - Y) the bound applies beyond.
    pub threshold: f64,
}

impl HoeffdingReport {
    /// exp(-rate * t), the bound on Pr(a_T >= 0) for t above the threshold.
    pub fn bound_at(&self, t: f64) -> f64 {
        (-self.rate * t).exp()
    }
}

/// Upper bound u(Y)/(1 - beta) on the expected discounted utility of any
/// constant consumption plan with mean income Y.
pub fn jensen_cap(utility: &UtilityFunction, mean_income: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(utility.eval(mean_income)? / (1.0 - beta))
}

/// Compares initial assets against the consume-all threshold u^-1(cap).
///
/// `ConsumeAllPreferred` means a rational agent prefers exhausting assets in
/// finite time (early ruin) over any infinite fixed-consumption plan.
pub fn obligatory_probe(
    a0: f64,
    utility: &UtilityFunction,
    mean_income: f64,
    beta: f64,
) -> Result<ObligatoryVerdict> {
    let cap = jensen_cap(utility, mean_income, beta)?;
    let threshold = utility.invert(cap)?;
    let verdict = if a0 > threshold {
        Verdict::ConsumeAllPreferred
    } else {
        Verdict::CapBinding
    };
    Ok(ObligatoryVerdict {
        cap,
        threshold,
        a0,
        verdict,
    })
}

/// Simulates the fixed-consumption plan c_t = c_fixed until ruin or horizon.
///
/// The raw recurrence keeps running even when the fixed amount exceeds
/// current assets; the first non-positive asset level is the ruin time.
pub fn simulate_obligatory(
    c_fixed: f64,
    subsistence_floor: f64,
    params: &ModelParams,
    income: &IncomeProcess,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    if subsistence_floor < 0.0 {
        return Err(Error::Constraint(format!(
            "subsistence floor must be non-negative, got {subsistence_floor}"
        )));
    }
    if c_fixed < subsistence_floor {
        return Err(Error::Constraint(format!(
            "fixed consumption {c_fixed} is below the subsistence floor {subsistence_floor}"
        )));
    }
    let mut trajectory = Trajectory::new(params.initial_assets);
    let mut sampler = income.sampler();
    for t in 0..horizon {
        let y = sampler.draw(t, rng);
        let next = trajectory.push_period(c_fixed, params.return_rate, y);
        if next <= 0.0 {
            break;
        }
    }
    debug_assert_eq!(trajectory.ruin_time, detect_ruin(&trajectory.assets));
    Ok(trajectory)
}

/// Validity threshold 2 a0 / (B - Y) for the ruin bound's horizon.
pub fn hoeffding_threshold(a0: f64, mean_income: f64, mean_subsistence: f64) -> Result<f64> {
    if mean_subsistence <= mean_income {
        return Err(Error::Inapplicable(format!(
            "ruin bound requires mean subsistence {mean_subsistence} > mean income {mean_income}"
        )));
    }
    Ok(2.0 * a0 / (mean_subsistence - mean_income))
}

/// Builds the exponential ruin-bound report without fixing a horizon.
pub fn hoeffding_report(
    a0: f64,
    mean_income: f64,
    mean_subsistence: f64,
    subsistence_half_width: f64,
    income_half_width: f64,
) -> Result<HoeffdingReport> {
    let threshold = hoeffding_threshold(a0, mean_income, mean_subsistence)?;
    let spread = subsistence_half_width + income_half_width;
    if subsistence_half_width < 0.0 || income_half_width < 0.0 || spread == 0.0 {
        return Err(Error::Domain(format!(
            "half widths must be non-negative and not both zero, got ({subsistence_half_width}, {income_half_width})"
        )));
    }
    let drift = mean_subsistence - mean_income;
    let rate = drift * drift / (8.0 * spread * spread);
    Ok(HoeffdingReport {
        drift,
        rate,
        threshold,
    })
}

/// Upper bound exp(-c T) on Pr(a_T >= 0) under the binding floor, with
/// c = (B - Y)^2 / (8 (delta + epsilon)^2), valid for T > 2 a0 / (B - Y).
pub fn hoeffding_bound(
    a0: f64,
    mean_income: f64,
    mean_subsistence: f64,
    subsistence_half_width: f64,
    income_half_width: f64,
    horizon: f64,
) -> Result<f64> {
    let report = hoeffding_report(
        a0,
        mean_income,
        mean_subsistence,
        subsistence_half_width,
        income_half_width,
    )?;
    if horizon <= report.threshold {
        return Err(Error::BelowThreshold {
            t: horizon,
            t_min: report.threshold,
        });
    }
    Ok(report.bound_at(horizon))
}

/// Utility change, per beta^T, of replacing a terminal consumption c_T >= 2b
/// with the tail (c_T - b, b, b, ...). Non-negative when beta > 1/2 and the
/// utility is concave with u(0) >= 0.
pub fn improve_case1(
    c_terminal: f64,
    b: f64,
    beta: f64,
    utility: &UtilityFunction,
) -> Result<f64> {
    check_improvement_beta(beta)?;
    if b < 0.0 {
        return Err(Error::Constraint(format!("b must be non-negative, got {b}")));
    }
    if c_terminal < 2.0 * b {
        return Err(Error::Constraint(format!(
            "case 1 requires c_T >= 2b, got c_T = {c_terminal}, b = {b}"
        )));
    }
    Ok(utility.eval(c_terminal - b)? + beta / (1.0 - beta) * utility.eval(b)?
        - utility.eval(c_terminal)?)
}

/// Utility change, per beta^T, of replacing a terminal consumption
/// b <= c_T < 2b with the constant tail (b, b, ...).
pub fn improve_case2(
    c_terminal: f64,
    b: f64,
    beta: f64,
    utility: &UtilityFunction,
) -> Result<f64> {
    check_improvement_beta(beta)?;
    if b < 0.0 {
        return Err(Error::Constraint(format!("b must be non-negative, got {b}")));
    }
    if !(c_terminal >= b && c_terminal < 2.0 * b) {
        return Err(Error::Constraint(format!(
            "case 2 requires b <= c_T < 2b, got c_T = {c_terminal}, b = {b}"
        )));
    }
    Ok(utility.eval(b)? / (1.0 - beta) - utility.eval(c_terminal)?)
}

/// Split point eps* = c_T / (1 + beta^(-1/lambda)), the unique solution of
/// the first-order condition beta * eps^-lambda = (c_T - eps)^-lambda.
pub fn isoelastic_split_epsilon(c_terminal: f64, beta: f64, lambda: f64) -> Result<f64> {
    if c_terminal <= 0.0 {
        return Err(Error::Domain(format!(
            "terminal consumption must be positive, got {c_terminal}"
        )));
    }
    check_beta(beta)?;
    if !(lambda > 0.0) || lambda == 1.0 {
        return Err(Error::Domain(format!(
            "lambda must be positive and different from 1, got {lambda}"
        )));
    }
    Ok(c_terminal / (1.0 + beta.powf(-1.0 / lambda)))
}

/// Signed gain g(eps) - u(c_T) with g(eps) = u(c_T - eps) + beta * u(eps).
///
/// Positive means splitting the terminal consumption and continuing one more
/// period beats exhausting it at once. The sign depends on the utility
/// normalization, so the gain is reported rather than asserted.
pub fn split_gain(
    c_terminal: f64,
    beta: f64,
    utility: &UtilityFunction,
    eps: f64,
) -> Result<f64> {
    check_beta(beta)?;
    if !(eps >= 0.0 && eps < c_terminal) {
        return Err(Error::Domain(format!(
            "split must satisfy 0 <= eps < c_T, got eps = {eps}, c_T = {c_terminal}"
        )));
    }
    let at_eps = utility.eval(eps)?;
    Ok(utility.eval(c_terminal - eps)? + beta * at_eps - utility.eval(c_terminal)?)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!(
            "discount factor must lie in (0, 1), got {beta}"
        )));
    }
    Ok(())
}

fn check_improvement_beta(beta: f64) -> Result<()> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(Error::Constraint(format!(
            "the improvement constructions require beta in (1/2, 1), got {beta}"
        )));
    }
    Ok(())
}

//! Infinite-horizon consumption policies by value iteration.
//!
//! The value function lives on an equally spaced asset grid and is linearly
//! interpolated between nodes. Each Bellman update searches consumption over
//! an equally spaced sub-grid of the feasible interval per state; ruin
//! (next-period assets <= 0) is absorbing with zero continuation utility.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::income::{IncomeProcess, SubsistenceProcess};
use crate::dynamics::ModelParams;
use crate::utility::UtilityFunction;

/// Discretization and convergence controls.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub a_min: f64,
    pub a_max: f64,
    pub n_points: usize,
    pub n_consumption_points: usize,
    /// Quantile nodes for the income expectation.
    pub n_income_nodes: usize,
    /// Sup-norm convergence threshold.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Lower bound standing in for the open constraint c > 0.
    /// Defaults to 1e-6 times the grid maximum when absent.
    pub c_floor: Option<f64>,
}

impl GridSpec {
    pub fn new(a_min: f64, a_max: f64, n_points: usize) -> Self {
        Self {
            a_min,
            a_max,
            n_points,
            n_consumption_points: 513,
            n_income_nodes: 7,
            tolerance: 1e-6,
            max_iterations: 10_000,
            c_floor: None,
        }
    }

    /// Desk-scale defaults sized from the model calibration: grid from 0 to
    /// 4 * max(a0, 20 * mean income), tolerance scaled to the utility level.
    pub fn default_for(
        params: &ModelParams,
        income: &IncomeProcess,
        utility: &UtilityFunction,
    ) -> Self {
        let y = income.mean();
        let a_max = 4.0 * params.initial_assets.max(20.0 * y);
        let scale = utility
            .eval(y + 1.0)
            .map(f64::abs)
            .unwrap_or(1.0)
            .max(1.0);
        let mut spec = Self::new(0.0, a_max, 2001);
        spec.tolerance = 1e-6 * scale;
        spec
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_consumption_points(mut self, n: usize) -> Self {
        self.n_consumption_points = n;
        self
    }

    pub fn with_income_nodes(mut self, n: usize) -> Self {
        self.n_income_nodes = n;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_c_floor(mut self, c_floor: f64) -> Self {
        self.c_floor = Some(c_floor);
        self
    }

    /// Effective consumption floor.
    pub fn effective_c_floor(&self) -> f64 {
        self.c_floor.unwrap_or(1e-6 * self.a_max)
    }

    fn validate(&self) -> Result<()> {
        if self.a_max <= self.a_min {
            return Err(Error::Config(format!(
                "grid maximum {} must exceed grid minimum {}",
                self.a_max, self.a_min
            )));
        }
        if self.a_min < 0.0 {
            return Err(Error::Config(format!(
                "grid minimum must be non-negative, got {}",
                self.a_min
            )));
        }
        if self.n_points < 2 || self.n_consumption_points < 2 {
            return Err(Error::Config(
                "need at least 2 grid points and 2 consumption points".into(),
            ));
        }
        if self.n_income_nodes == 0 {
            return Err(Error::Config("need at least one income node".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Equally spaced asset grid from `a_min` to `a_max` inclusive.
pub fn build_grid(spec: &GridSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n_points;
    let step = (spec.a_max - spec.a_min) / (n - 1) as f64;
    Ok((0..n).map(|i| spec.a_min + step * i as f64).collect())
}

/// Linear interpolation on an equally spaced grid; flat beyond the ends.
#[inline]
pub fn interp(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    let lo = grid[0];
    if x <= lo {
        return values[0];
    }
    let hi = grid[n - 1];
    if x >= hi {
        return values[n - 1];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let idx = (((x - lo) / step) as usize).min(n - 2);
    let w = ((x - grid[idx]) / step).clamp(0.0, 1.0);
    values[idx] + w * (values[idx + 1] - values[idx])
}

/// Converged value function and consumption rule on the asset grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub consumption: Vec<f64>,
    c_floor: f64,
}

impl Policy {
    /// Rebuilds a policy from stored tables (e.g. a policy file).
    pub fn from_parts(
        grid: Vec<f64>,
        values: Vec<f64>,
        consumption: Vec<f64>,
        c_floor: f64,
    ) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() || grid.len() != consumption.len() {
            return Err(Error::Config(
                "policy tables must share one length of at least 2".into(),
            ));
        }
        let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        if !(step > 0.0) {
            return Err(Error::Config("policy grid must be increasing".into()));
        }
        for (i, w) in grid.windows(2).enumerate() {
            let d = w[1] - w[0];
            if (d - step).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::Config(format!(
                    "policy grid must be equally spaced (gap {} at index {i}, expected {step})",
                    d
                )));
            }
        }
        Ok(Self {
            grid,
            values,
            consumption,
            c_floor,
        })
    }

    pub fn c_floor(&self) -> f64 {
        self.c_floor
    }

    /// Consumption at asset level `a`: linear interpolation of the stored
    /// rule, flat above the grid, clamped into (c_floor, a].
    pub fn consume(&self, a: f64) -> f64 {
        interp(&self.grid, &self.consumption, a)
            .max(self.c_floor)
            .min(a)
    }

    /// Value at asset level `a` (flat extrapolation beyond the grid).
    pub fn value_at(&self, a: f64) -> f64 {
        interp(&self.grid, &self.values, a)
    }
}

/// Convergence record of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub final_residual: f64,
    /// Sup-norm residual after each Bellman update, in order.
    pub residuals: Vec<f64>,
    /// Grid indices where the consumption floor exceeded the asset level.
    pub infeasible_points: Vec<usize>,
}

/// A converged policy together with its solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub policy: Policy,
    pub diagnostics: SolveDiagnostics,
}

struct UpdateInputs<'a> {
    grid: &'a [f64],
    nodes: &'a [f64],
    beta: f64,
    return_rate: f64,
    utility: &'a UtilityFunction,
    c_lo: f64,
    n_consumption_points: usize,
}

/// One Bellman update at a single grid point. Returns the new value, the
/// maximizing consumption, and whether the floor was infeasible there.
fn update_point(a: f64, values: &[f64], inp: &UpdateInputs<'_>) -> (f64, f64, bool) {
    if inp.c_lo > a {
        // Cannot afford the floor: consume everything now, ruin after.
        // Callers reject utilities that diverge at the grid minimum.
        let v = if a > 0.0 {
            inp.utility.eval_unchecked(a)
        } else {
            inp.utility.eval(0.0).unwrap_or(0.0)
        };
        return (v, a, true);
    }
    let span = a - inp.c_lo;
    let denom = (inp.n_consumption_points - 1) as f64;
    let inv_nodes = 1.0 / inp.nodes.len() as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_c = inp.c_lo;
    for j in 0..inp.n_consumption_points {
        let c = inp.c_lo + span * (j as f64 / denom);
        let kept = inp.return_rate * (a - c);
        let mut expected = 0.0;
        for &y in inp.nodes {
            let a_next = kept + y;
            if a_next > 0.0 {
                expected += interp(inp.grid, values, a_next);
            }
        }
        let total = inp.utility.eval_unchecked(c) + inp.beta * expected * inv_nodes;
        // Strict comparison breaks argmax ties toward smaller consumption.
        if total > best {
            best = total;
            best_c = c;
        }
    }
    (best, best_c, false)
}

/// Applies the Bellman operator once.
///
/// Returns the updated table and the sup-norm residual against `values`.
/// Grid points where the subsistence floor exceeds the asset level take the
/// consume-everything ruin value.
pub fn bellman_update(
    values: &[f64],
    grid: &[f64],
    params: &ModelParams,
    income: &IncomeProcess,
    utility: &UtilityFunction,
    floor: Option<&SubsistenceProcess>,
    spec: &GridSpec,
) -> Result<(Vec<f64>, f64)> {
    let (new_values, residual, _) =
        bellman_update_full(values, grid, params, income, utility, floor, spec)?;
    Ok((new_values, residual))
}

fn bellman_update_full(
    values: &[f64],
    grid: &[f64],
    params: &ModelParams,
    income: &IncomeProcess,
    utility: &UtilityFunction,
    floor: Option<&SubsistenceProcess>,
    spec: &GridSpec,
) -> Result<(Vec<f64>, f64, Vec<usize>)> {
    if values.len() != grid.len() {
        return Err(Error::Config(format!(
            "value table length {} does not match grid length {}",
            values.len(),
            grid.len()
        )));
    }
    let nodes = income.quantile_nodes(spec.n_income_nodes)?;
    let c_floor = spec.effective_c_floor();
    let c_lo = floor.map(|f| f.mean()).unwrap_or(c_floor).max(c_floor);
    if grid[0] < c_lo {
        // The consume-everything fallback below needs u finite at the grid
        // minimum; reject divergent utilities up front.
        utility.eval(grid[0]).map_err(|e| {
            Error::Config(format!(
                "utility must be finite at the grid minimum {} ({e}); raise a_min",
                grid[0]
            ))
        })?;
    }
    let inp = UpdateInputs {
        grid,
        nodes: &nodes,
        beta: params.beta,
        return_rate: params.return_rate,
        utility,
        c_lo,
        n_consumption_points: spec.n_consumption_points,
    };

    // Iteration n+1 reads only iteration n's table, so points are independent.
    let results: Vec<(f64, f64, bool)> = grid
        .par_iter()
        .map(|&a| update_point(a, values, &inp))
        .collect();

    let mut new_values = Vec::with_capacity(results.len());
    let mut infeasible = Vec::new();
    let mut residual = 0.0f64;
    for (i, (v, _, inf)) in results.iter().enumerate() {
        new_values.push(*v);
        if *inf {
            infeasible.push(i);
        }
        residual = residual.max((v - values[i]).abs());
    }
    Ok((new_values, residual, infeasible))
}

/// Iterates the Bellman operator from the zero table to convergence and
/// extracts the consumption rule from the fixed point.
pub fn solve_policy(
    params: &ModelParams,
    income: &IncomeProcess,
    utility: &UtilityFunction,
    floor: Option<&SubsistenceProcess>,
    spec: &GridSpec,
) -> Result<Solution> {
    let grid = build_grid(spec)?;
    let mut values = vec![0.0; grid.len()];
    let mut residuals = Vec::new();
    let mut infeasible = Vec::new();
    let mut converged = false;

    for _ in 0..spec.max_iterations {
        let (new_values, residual, inf) =
            bellman_update_full(&values, &grid, params, income, utility, floor, spec)?;
        values = new_values;
        residuals.push(residual);
        infeasible = inf;
        if residual <= spec.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: residuals.len(),
            residual: residuals.last().copied().unwrap_or(f64::INFINITY),
        });
    }

    // One more pass over the converged table records the argmax.
    let nodes = income.quantile_nodes(spec.n_income_nodes)?;
    let c_floor = spec.effective_c_floor();
    let c_lo = floor.map(|f| f.mean()).unwrap_or(c_floor).max(c_floor);
    let inp = UpdateInputs {
        grid: &grid,
        nodes: &nodes,
        beta: params.beta,
        return_rate: params.return_rate,
        utility,
        c_lo,
        n_consumption_points: spec.n_consumption_points,
    };
    let consumption: Vec<f64> = grid
        .par_iter()
        .map(|&a| update_point(a, &values, &inp).1)
        .collect();

    let diagnostics = SolveDiagnostics {
        iterations: residuals.len(),
        final_residual: residuals.last().copied().unwrap_or(0.0),
        residuals,
        infeasible_points: infeasible,
    };
    let policy = Policy {
        grid,
        values,
        consumption,
        c_floor,
    };
    Ok(Solution {
        policy,
        diagnostics,
    })
}

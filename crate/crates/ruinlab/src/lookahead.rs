//! Adversarial two-phase income instances and the lookahead utility gap.
//!
//! This module works in the no-discounting, square-root-utility setting with
//! income-first accounting: a period's income is available for that period's
//! consumption and both agents start from zero assets. Income pays 1 for the
//! first k/2 periods and a level x, drawn uniformly from [0, 1], afterwards.
//! An agent who can see x ahead of time consumes (1 + x)/2 throughout; the
//! gap against agents without that foresight grows linearly in k.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One realized two-phase income instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LookaheadInstance {
    /// Even horizon; the phase switch happens at k/2.
    pub k: usize,
    /// Second-phase income level in [0, 1].
    pub x: f64,
    pub income: Vec<f64>,
}

/// Builds the instance with income 1 for t < k/2 and x afterwards.
pub fn build_lookahead_instance(k: usize, x: f64) -> Result<LookaheadInstance> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Config(format!(
            "instance length must be even and at least 2, got {k}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "second-phase income must lie in [0, 1], got {x}"
        )));
    }
    let half = k / 2;
    let mut income = vec![1.0; k];
    income[half..].fill(x);
    Ok(LookaheadInstance { k, x, income })
}

/// The lookahead agent's plan: constant consumption (1 + x)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct LookaheadPlan {
    pub total_utility: f64,
    pub consumption: Vec<f64>,
    /// Smallest running asset level under income-first accounting.
    pub min_running_assets: f64,
    /// Whether running assets never went (meaningfully) negative.
    pub feasible: bool,
}

/// Evaluates the constant (1 + x)/2 plan on the instance.
pub fn lookahead_plan(k: usize, x: f64) -> Result<LookaheadPlan> {
    let instance = build_lookahead_instance(k, x)?;
    let level = (1.0 + x) / 2.0;
    let consumption = vec![level; k];
    let mut assets = 0.0;
    let mut min_assets = f64::INFINITY;
    for &y in &instance.income {
        assets = assets + y - level;
        min_assets = min_assets.min(assets);
    }
    Ok(LookaheadPlan {
        total_utility: k as f64 * level.sqrt(),
        consumption,
        min_running_assets: min_assets,
        feasible: min_assets >= -1e-12,
    })
}

/// Total utility k * sqrt((1 + x)/2) of the lookahead plan.
pub fn lookahead_utility(k: usize, x: f64) -> Result<f64> {
    Ok(lookahead_plan(k, x)?.total_utility)
}

/// No-lookahead policies evaluated against the instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineStrategy {
    /// Consume exactly the income received each period.
    ConsumeIncome,
    /// Try to consume a fixed level each period (clamped to what is there).
    ExpectedConstant { level: f64 },
    /// Consume a fixed fraction of assets-plus-income each period.
    AssetFraction { fraction: f64 },
}

impl BaselineStrategy {
    pub fn name(&self) -> String {
        match self {
            Self::ConsumeIncome => "consume_income".into(),
            Self::ExpectedConstant { level } => format!("expected_constant({level})"),
            Self::AssetFraction { fraction } => format!("asset_fraction({fraction})"),
        }
    }
}

/// The built-in strategies an x-oblivious agent might reasonably run:
/// hand-to-mouth, and the certainty-equivalent constant 0.75, the mean
/// per-period income E[(1 + x)/2] of the instance family. Both realize a
/// utility deficit that scales linearly in k; fraction-of-assets smoothing
/// stays available as a strategy kind but carries a large k-independent
/// transient, so it is not part of the reference set.
pub fn baseline_zoo() -> Vec<BaselineStrategy> {
    vec![
        BaselineStrategy::ConsumeIncome,
        BaselineStrategy::ExpectedConstant { level: 0.75 },
    ]
}

/// Result of simulating one baseline on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub utility: f64,
    pub consumption: Vec<f64>,
    /// Sum of first-half consumption (the quantity a deterministic
    /// no-lookahead algorithm commits to before seeing x).
    pub first_half_consumption: f64,
}

/// Simulates a baseline under income-first accounting. Desired consumption
/// is clamped to available assets, so every run is feasible.
pub fn run_baseline(strategy: BaselineStrategy, instance: &LookaheadInstance) -> BaselineRun {
    let mut assets = 0.0;
    let mut utility = 0.0;
    let mut first_half = 0.0;
    let mut consumption = Vec::with_capacity(instance.k);
    for (t, &y) in instance.income.iter().enumerate() {
        let available = assets + y;
        let desired = match strategy {
            BaselineStrategy::ConsumeIncome => y,
            BaselineStrategy::ExpectedConstant { level } => level,
            BaselineStrategy::AssetFraction { fraction } => fraction * available,
        };
        let c = desired.clamp(0.0, available);
        assets = available - c;
        utility += c.sqrt();
        if t < instance.k / 2 {
            first_half += c;
        }
        consumption.push(c);
    }
    BaselineRun {
        utility,
        consumption,
        first_half_consumption: first_half,
    }
}

/// The best deterministic first-half commitment found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicPlan {
    /// Committed consumption for t < k/2 (already feasibility-clamped).
    pub first_half: Vec<f64>,
    /// Expected total utility over the x nodes used in the search.
    pub expected_utility: f64,
}

impl DeterministicPlan {
    /// Utility this plan realizes on the instance with second-phase level x:
    /// the committed first half, then the optimal completion (an equal split
    /// of the remaining budget, which is optimal under square-root utility).
    pub fn realized_utility(&self, x: f64) -> f64 {
        let half = self.first_half.len();
        let mut assets = 0.0;
        let mut utility = 0.0;
        for &z in &self.first_half {
            let available = assets + 1.0;
            let c = z.clamp(0.0, available);
            assets = available - c;
            utility += c.sqrt();
        }
        let per_period = assets / half as f64 + x;
        utility + half as f64 * per_period.sqrt()
    }
}

/// Exhaustively searches first-half plans on a per-coordinate grid and
/// completes each with the optimal second half, maximizing the expected
/// utility over x (midpoint quadrature nodes on [0, 1]).
///
/// The search is exponential in k/2; it guards against more than 1e8 plan
/// evaluations and rejects k > 8.
pub fn brute_force_best_deterministic(
    k: usize,
    n_consumption_grid: usize,
    n_x_samples: usize,
) -> Result<DeterministicPlan> {
    if k < 2 || k % 2 != 0 || k > 8 {
        return Err(Error::Config(format!(
            "brute force supports even k between 2 and 8, got {k}"
        )));
    }
    if n_consumption_grid < 16 || n_x_samples < 16 {
        return Err(Error::Config(
            "brute force needs at least 16 grid points and 16 x samples".into(),
        ));
    }
    let half = k / 2;
    let evaluations = (n_consumption_grid as f64).powi(half as i32) * n_x_samples as f64;
    if evaluations > 1e8 {
        return Err(Error::Config(format!(
            "search would take {evaluations:.1e} plan evaluations (limit 1e8)"
        )));
    }
    let xs: Vec<f64> = (0..n_x_samples)
        .map(|i| (i as f64 + 0.5) / n_x_samples as f64)
        .collect();
    best_deterministic_over_xs(k, n_consumption_grid, &xs)
}

/// Same search against an explicit list of x values (used for degenerate
/// distributions in tests and by the quadrature wrapper above).
pub fn best_deterministic_over_xs(
    k: usize,
    n_consumption_grid: usize,
    xs: &[f64],
) -> Result<DeterministicPlan> {
    if xs.is_empty() {
        return Err(Error::Config("need at least one x value".into()));
    }
    let half = k / 2;
    let mut indices = vec![0usize; half];
    let mut best_utility = f64::NEG_INFINITY;
    let mut best_plan: Vec<f64> = Vec::new();

    loop {
        // Coordinate i ranges over [0, i + 1]: total income available by
        // period i is at most i + 1; clamping below handles the rest.
        let mut assets = 0.0;
        let mut first_half_utility = 0.0;
        let mut plan = Vec::with_capacity(half);
        for (i, &idx) in indices.iter().enumerate() {
            let z_max = (i + 1) as f64;
            let desired = z_max * idx as f64 / (n_consumption_grid - 1) as f64;
            let available = assets + 1.0;
            let c = desired.clamp(0.0, available);
            assets = available - c;
            first_half_utility += c.sqrt();
            plan.push(c);
        }
        let mut expected = 0.0;
        for &x in xs {
            let per_period = assets / half as f64 + x;
            expected += first_half_utility + half as f64 * per_period.sqrt();
        }
        expected /= xs.len() as f64;
        if expected > best_utility {
            best_utility = expected;
            best_plan = plan;
        }

        // Lexicographic advance through the index grid.
        let mut pos = 0;
        loop {
            if pos == half {
                return Ok(DeterministicPlan {
                    first_half: best_plan,
                    expected_utility: best_utility,
                });
            }
            indices[pos] += 1;
            if indices[pos] < n_consumption_grid {
                break;
            }
            indices[pos] = 0;
            pos += 1;
        }
    }
}

/// Margin of the square-root upper-bound inequality:
/// sqrt(a) + (w - a)/(2 sqrt(a)) - (w - a)^2 / 8 - sqrt(w), claimed >= 0
/// for w in (0, 1) and a in (1/2, 1).
pub fn lemma1_margin(w: f64, a: f64) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!("w must lie in (0, 1), got {w}")));
    }
    if !(a > 0.5 && a < 1.0) {
        return Err(Error::Domain(format!("a must lie in (1/2, 1), got {a}")));
    }
    let d = w - a;
    Ok(a.sqrt() + d / (2.0 * a.sqrt()) - d * d / 8.0 - w.sqrt())
}

/// Monte Carlo estimate of the lookahead utility gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Estimates the mean gap between the lookahead plan and the best baseline,
/// over x ~ U(0, 1). When k <= 8 the brute-force deterministic plan joins
/// the baseline set.
pub fn estimate_gap(k: usize, n_samples: usize, rng: &mut RngStream) -> Result<GapEstimate> {
    estimate_gap_against(k, n_samples, rng, k <= 8)
}

/// Gap estimate with explicit control over the brute-force baseline.
pub fn estimate_gap_against(
    k: usize,
    n_samples: usize,
    rng: &mut RngStream,
    include_brute_force: bool,
) -> Result<GapEstimate> {
    if n_samples == 0 {
        return Err(Error::Config("need at least one x sample".into()));
    }
    if k < 2 || k % 2 != 0 {
        return Err(Error::Config(format!(
            "instance length must be even and at least 2, got {k}"
        )));
    }
    let zoo = baseline_zoo();
    let brute = if include_brute_force {
        Some(brute_force_best_deterministic(k, 129, 201)?)
    } else {
        None
    };

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let x = rng.uniform();
        let instance = build_lookahead_instance(k, x)?;
        let lookahead = lookahead_utility(k, x)?;
        let mut best = f64::NEG_INFINITY;
        for &strategy in &zoo {
            best = best.max(run_baseline(strategy, &instance).utility);
        }
        if let Some(plan) = &brute {
            best = best.max(plan.realized_utility(x));
        }
        let gap = lookahead - best;
        sum += gap;
        sum_sq += gap * gap;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - sum * sum / n) / (n - 1.0).max(1.0)).max(0.0);
    Ok(GapEstimate {
        mean,
        std_error: (variance / n).sqrt(),
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_construction() {
        let inst = build_lookahead_instance(4, 0.5).unwrap();
        assert_eq!(inst.income, vec![1.0, 1.0, 0.5, 0.5]);

        let inst = build_lookahead_instance(2, 0.0).unwrap();
        assert_eq!(inst.income, vec![1.0, 0.0]);

        assert!(matches!(
            build_lookahead_instance(3, 0.5),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_lookahead_instance(4, 1.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lookahead_utility_examples() {
        let u = lookahead_utility(4, 0.5).unwrap();
        assert!((u - 4.0 * 0.75f64.sqrt()).abs() < 1e-12);
        assert!((u - 3.46410).abs() < 1e-5);

        assert!((lookahead_utility(4, 1.0).unwrap() - 4.0).abs() < 1e-12);

        let u = lookahead_utility(4, 0.0).unwrap();
        assert!((u - 4.0 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((u - 2.82843).abs() < 1e-5);
    }

    #[test]
    fn lookahead_plan_is_feasible() {
        for k in [2usize, 4, 8, 16, 64] {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let plan = lookahead_plan(k, x).unwrap();
                assert!(
                    plan.feasible,
                    "infeasible at k = {k}, x = {x}: min assets {}",
                    plan.min_running_assets
                );
                assert_eq!(plan.consumption.len(), k);
            }
        }
    }

    #[test]
    fn run_baseline_examples() {
        let inst = build_lookahead_instance(4, 0.5).unwrap();
        let run = run_baseline(BaselineStrategy::ConsumeIncome, &inst);
        assert!((run.utility - (2.0 + 2.0 * 0.5f64.sqrt())).abs() < 1e-12);
        assert!((run.utility - 3.41421).abs() < 1e-5);
        assert!((run.first_half_consumption - 2.0).abs() < 1e-15);

        // The constant plan at the mean is exactly feasible when x equals
        // its mean, matching the lookahead utility.
        let run = run_baseline(BaselineStrategy::ExpectedConstant { level: 0.75 }, &inst);
        assert!((run.utility - 4.0 * 0.75f64.sqrt()).abs() < 1e-12);

        // With x = 0 the constant plan gets clamped once savings run out.
        let inst = build_lookahead_instance(4, 0.0).unwrap();
        let run = run_baseline(BaselineStrategy::ExpectedConstant { level: 0.75 }, &inst);
        let expected = 2.0 * 0.75f64.sqrt() + 0.5f64.sqrt();
        assert!((run.utility - expected).abs() < 1e-12);
        assert!((run.utility - 2.43916).abs() < 1e-5);
        assert_eq!(run.consumption, vec![0.75, 0.75, 0.5, 0.0]);
    }

    #[test]
    fn lemma1_margin_examples() {
        let m = lemma1_margin(0.25, 0.75).unwrap();
        assert!((m - 0.0461).abs() < 1e-4, "margin {m}");

        // Equality at w = a, exactly.
        assert_eq!(lemma1_margin(0.75, 0.75).unwrap(), 0.0);

        let m = lemma1_margin(0.99, 0.51).unwrap();
        assert!((m - 0.02642).abs() < 1e-4, "margin {m}");

        assert!(lemma1_margin(0.0, 0.75).is_err());
        assert!(lemma1_margin(0.5, 0.5).is_err());
        assert!(lemma1_margin(0.5, 1.0).is_err());
    }

    #[test]
    fn brute_force_best_plan_at_k2() {
        let plan = brute_force_best_deterministic(2, 257, 257).unwrap();
        assert_eq!(plan.first_half.len(), 1);
        // The optimum commits roughly three quarters of the first period's
        // income; the exact root of the first-order condition is near 0.71.
        let z1 = plan.first_half[0];
        assert!((0.6..0.85).contains(&z1), "z1 = {z1}");

        // Strictly below the expected lookahead utility.
        let n = 10_001;
        let mean_lookahead: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                lookahead_utility(2, x).unwrap()
            })
            .sum::<f64>()
            / n as f64;
        assert!(
            plan.expected_utility < mean_lookahead - 1e-3,
            "{} vs {}",
            plan.expected_utility,
            mean_lookahead
        );
    }

    #[test]
    fn brute_force_matches_lookahead_without_uncertainty() {
        // x pinned to 1: a constant income of 1 hides nothing.
        let plan = best_deterministic_over_xs(2, 257, &[1.0]).unwrap();
        let lookahead = lookahead_utility(2, 1.0).unwrap();
        assert!(
            (plan.expected_utility - lookahead).abs() < 1e-9,
            "{} vs {lookahead}",
            plan.expected_utility
        );
    }

    #[test]
    fn expected_gap_grows_with_k() {
        let gap2 = {
            let plan = brute_force_best_deterministic(2, 129, 201).unwrap();
            mean_gap_against_plan(2, &plan)
        };
        let gap4 = {
            let plan = brute_force_best_deterministic(4, 65, 201).unwrap();
            mean_gap_against_plan(4, &plan)
        };
        assert!(
            gap4 / gap2 >= 1.5,
            "gap ratio {} (gap4 = {gap4}, gap2 = {gap2})",
            gap4 / gap2
        );
    }

    fn mean_gap_against_plan(k: usize, plan: &DeterministicPlan) -> f64 {
        let n = 2_001;
        (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                lookahead_utility(k, x).unwrap() - plan.realized_utility(x)
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn estimate_gap_is_positive_and_reproducible() {
        let mut rng = RngStream::new(7, 0);
        let est = estimate_gap(2, 2_000, &mut rng).unwrap();
        assert!(est.mean > 0.0);
        assert!(est.std_error > 0.0);

        let mut rng = RngStream::new(7, 0);
        let again = estimate_gap(2, 2_000, &mut rng).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn estimate_gap_rejects_bad_arguments() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(
            estimate_gap(2, 0, &mut rng),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            estimate_gap(3, 100, &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn resource_guard_trips_on_huge_searches() {
        assert!(matches!(
            brute_force_best_deterministic(8, 1024, 1024),
            Err(Error::Config(_))
        ));
    }
}

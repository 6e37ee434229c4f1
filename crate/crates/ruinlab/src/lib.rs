//! Discounted-utility consumption under bounded agency.
//!
//! The model: an agent with assets a_t consumes c_t each period under
//! 0 < c_t <= a_t, assets evolve as a_{t+1} = R (a_t - c_t) + y_t with
//! stochastic income y_t, and the objective is the discounted utility
//! sum of beta^t u(c_t) for a concave u. Ruin is the first time next-period
//! assets drop to zero or below.
//!
//! The crate provides:
//!
//! - [`utility`], [`income`], [`dynamics`], [`rng`]: the domain types, the
//!   asset recurrence, ruin detection, and reproducible random streams;
//! - [`solver`]: optimal consumption policies by value iteration on an
//!   asset grid;
//! - [`scenarios`]: bound calculators and probes for constrained-agency
//!   regimes (fixed obligatory consumption, binding impulsive floors, the
//!   terminal-consumption improvement constructions, isoelastic splits);
//! - [`lookahead`]: the adversarial two-phase income instance and the
//!   utility gap between agents with and without schedule foresight;
//! - [`cohort`]: seeded multi-agent Monte Carlo with ruin-time histograms
//!   and calibrated presets.

pub mod cohort;
pub mod dynamics;
pub mod error;
pub mod income;
pub mod lookahead;
pub mod rng;
pub mod scenarios;
pub mod solver;
pub mod utility;

pub use cohort::{
    run_cohort, run_cohort_slice, simulate_agent, CohortConfig, CohortSummary, Preset,
    PresetCalibration, RuinHistogram, Scenario,
};
pub use dynamics::{detect_ruin, discounted_utility, step_assets, ModelParams, Trajectory};
pub use error::{Error, Result};
pub use income::{IncomeProcess, SubsistenceProcess};
pub use lookahead::{
    baseline_zoo, brute_force_best_deterministic, build_lookahead_instance, estimate_gap,
    estimate_gap_against, lemma1_margin, lookahead_plan, lookahead_utility, run_baseline,
    BaselineRun, BaselineStrategy, DeterministicPlan, GapEstimate, LookaheadInstance,
    LookaheadPlan,
};
pub use rng::RngStream;
pub use scenarios::{
    hoeffding_bound, hoeffding_report, hoeffding_threshold, improve_case1, improve_case2,
    isoelastic_split_epsilon, jensen_cap, obligatory_probe, simulate_obligatory, split_gain,
    HoeffdingReport, ObligatoryVerdict, Verdict,
};
pub use solver::{
    bellman_update, build_grid, interp, solve_policy, GridSpec, Policy, SolveDiagnostics,
    Solution,
};
pub use utility::UtilityFunction;

//! Command implementations.
//!
//! Every command returns the text it prints on success; failures carry the
//! process exit code per the contract: 0 success, 2 validation error,
//! 3 non-convergence, 4 verifier failure (1 for I/O).

use std::path::{Path, PathBuf};

use ruinlab::cohort::{run_cohort, CohortConfig, Scenario};
use ruinlab::lookahead::{estimate_gap_against, lemma1_margin};
use ruinlab::solver::{solve_policy, Policy, Solution};
use ruinlab::{
    hoeffding_report, improve_case1, improve_case2, isoelastic_split_epsilon, jensen_cap,
    obligatory_probe, split_gain, Error as LibError, IncomeProcess, ModelParams, RngStream,
    SubsistenceProcess, UtilityFunction, Verdict,
};

use crate::config::{OutputFormat, RunConfig, ScenarioConfig};
use crate::emit::{fmt_f64, histogram_csv, histogram_json, policy_csv, write_atomic, Json};

/// Failure with its exit code; `stdout` is a report to print before exiting
/// (e.g. the diagnostics of a non-converged solve).
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
    pub stdout: Option<String>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
            stdout: None,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
            stdout: None,
        }
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::NonConvergence { .. } => Self {
                message: e.to_string(),
                code: 3,
                stdout: None,
            },
            other => Self::validation(other.to_string()),
        }
    }
}

fn utility_from_flags(kind: &str, lambda: Option<f64>) -> Result<UtilityFunction, CliError> {
    match (kind, lambda) {
        ("sqrt", None) => Ok(UtilityFunction::Sqrt),
        ("log", None) => Ok(UtilityFunction::Log),
        ("isoelastic_shifted", Some(l)) => Ok(UtilityFunction::isoelastic_shifted(l)?),
        ("isoelastic_unshifted", Some(l)) => Ok(UtilityFunction::isoelastic_unshifted(l)?),
        ("isoelastic_shifted" | "isoelastic_unshifted", None) => Err(CliError::validation(
            format!("utility '{kind}' requires --lambda"),
        )),
        (other, Some(_)) if matches!(other, "sqrt" | "log") => Err(CliError::validation(
            format!("utility '{other}' does not take --lambda"),
        )),
        (other, _) => Err(CliError::validation(format!("unknown utility '{other}'"))),
    }
}

/// Solves the configured policy, applying the subsistence floor when the
/// scenario couples the policy with one.
fn solve_for(config: &RunConfig) -> Result<Solution, CliError> {
    let floor = match (&config.scenario, &config.subsistence) {
        (ScenarioConfig::Impulsive { use_policy: true }, Some(sub)) => Some(sub),
        _ => None,
    };
    match solve_policy(
        &config.model,
        &config.income,
        &config.utility,
        floor,
        &config.grid,
    ) {
        Ok(solution) => Ok(solution),
        Err(LibError::NonConvergence {
            iterations,
            residual,
        }) => {
            let mut diag = Json::object();
            diag.push("converged", Json::Bool(false));
            diag.push("iterations", Json::UInt(iterations as u64));
            diag.push("final_residual", Json::Float(residual));
            diag.push("tolerance", Json::Float(config.grid.tolerance));
            diag.push("config_echo", Json::Str(config.normalize()));
            Err(CliError {
                message: format!(
                    "value iteration did not converge after {iterations} iterations (residual {})",
                    fmt_f64(residual)
                ),
                code: 3,
                stdout: Some(diag.render()),
            })
        }
        Err(other) => Err(other.into()),
    }
}

fn solve_diagnostics_json(config: &RunConfig, solution: &Solution) -> Json {
    let mut diag = Json::object();
    diag.push("converged", Json::Bool(true));
    diag.push(
        "iterations",
        Json::UInt(solution.diagnostics.iterations as u64),
    );
    diag.push(
        "final_residual",
        Json::Float(solution.diagnostics.final_residual),
    );
    diag.push("tolerance", Json::Float(config.grid.tolerance));
    diag.push(
        "infeasible_floor_points",
        Json::UInt(solution.diagnostics.infeasible_points.len() as u64),
    );
    diag.push("config_echo", Json::Str(config.normalize()));
    diag
}

/// `solve`: write the converged policy tables plus solver diagnostics.
pub fn cmd_solve(config: &RunConfig) -> Result<String, CliError> {
    let solution = solve_for(config)?;
    let diag = solve_diagnostics_json(config, &solution);
    let base = PathBuf::from(&config.output_path);
    match config.format {
        OutputFormat::Csv => {
            write_file(&base.with_extension("csv"), &policy_csv(&solution.policy))?;
            write_file(&base.with_extension("json"), &diag.render())?;
        }
        OutputFormat::Json => {
            let mut doc = Json::object();
            doc.push("diagnostics", diag.clone());
            let mut tables = Json::object();
            tables.push(
                "asset",
                Json::Array(solution.policy.grid.iter().map(|&x| Json::Float(x)).collect()),
            );
            tables.push(
                "value",
                Json::Array(
                    solution.policy.values.iter().map(|&x| Json::Float(x)).collect(),
                ),
            );
            tables.push(
                "consumption",
                Json::Array(
                    solution
                        .policy
                        .consumption
                        .iter()
                        .map(|&x| Json::Float(x))
                        .collect(),
                ),
            );
            doc.push("policy", tables);
            write_file(&base.with_extension("json"), &doc.render())?;
        }
    }
    Ok(diag.render())
}

fn load_policy_csv(path: &str) -> Result<Policy, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read policy file '{path}': {e}")))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "asset,value,consumption" {
        return Err(CliError::validation(format!(
            "policy file '{path}' must start with 'asset,value,consumption', got '{header}'"
        )));
    }
    let (mut grid, mut values, mut consumption) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::validation(format!(
                "policy file '{path}' row {}: expected 3 fields",
                i + 2
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim().parse().map_err(|_| {
                CliError::validation(format!("policy file '{path}' row {}: bad number '{s}'", i + 2))
            })
        };
        grid.push(parse(fields[0])?);
        values.push(parse(fields[1])?);
        consumption.push(parse(fields[2])?);
    }
    let c_floor = grid.last().copied().unwrap_or(1.0) * 1e-6;
    Ok(Policy::from_parts(grid, values, consumption, c_floor)?)
}

fn build_scenario(config: &RunConfig) -> Result<Scenario, CliError> {
    Ok(match &config.scenario {
        ScenarioConfig::Obligatory { c_fixed } => Scenario::Obligatory { c_fixed: *c_fixed },
        ScenarioConfig::Impulsive { use_policy } => {
            let subsistence = config
                .subsistence
                .clone()
                .ok_or_else(|| CliError::validation("impulsive scenario without subsistence"))?;
            let policy = if *use_policy {
                Some(solve_for(config)?.policy)
            } else {
                None
            };
            Scenario::Impulsive {
                policy,
                subsistence,
            }
        }
        ScenarioConfig::TrueAgency => Scenario::TrueAgency {
            policy: solve_for(config)?.policy,
        },
        ScenarioConfig::Custom { policy_file } => Scenario::Custom {
            policy: load_policy_csv(policy_file)?,
        },
    })
}

fn summary_json(config: &RunConfig, histogram: &ruinlab::RuinHistogram) -> Result<Json, CliError> {
    let summary = histogram.summarize()?;
    let mut doc = Json::object();
    doc.push("n_agents", Json::UInt(summary.n_agents));
    doc.push("horizon", Json::UInt(config.horizon as u64));
    doc.push("master_seed", Json::UInt(config.master_seed));
    doc.push("ruin_fraction", Json::Float(summary.ruin_fraction));
    doc.push("survivor_fraction", Json::Float(summary.survivor_fraction));
    doc.push("median_ruin_time", Json::opt_float(summary.median_ruin_time));
    doc.push(
        "mode_ruin_time",
        Json::opt_uint(summary.mode_ruin_time.map(|t| t as u64)),
    );
    doc.push(
        "fraction_ruined_first_10",
        Json::Float(summary.fraction_ruined_first_10),
    );
    doc.push("config_echo", Json::Str(config.normalize()));
    Ok(doc)
}

/// `simulate`: run the configured cohort; write the histogram and summary.
pub fn cmd_simulate(config: &RunConfig) -> Result<String, CliError> {
    let scenario = build_scenario(config)?;
    let cohort = CohortConfig::new(
        scenario,
        config.n_agents,
        config.horizon,
        config.master_seed,
        config.model,
        config.income.clone(),
    )?;
    let histogram = run_cohort(&cohort);
    let summary = summary_json(config, &histogram)?;
    let base = PathBuf::from(&config.output_path);
    match config.format {
        OutputFormat::Csv => {
            write_file(&base.with_extension("csv"), &histogram_csv(&histogram))?;
            write_file(&base.with_extension("json"), &summary.render())?;
        }
        OutputFormat::Json => {
            let mut doc = summary.clone();
            doc.push("histogram", histogram_json(&histogram));
            write_file(&base.with_extension("json"), &doc.render())?;
        }
    }
    Ok(summary.render())
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    write_atomic(path, content).map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))
}

pub struct BoundsArgs {
    pub a0: f64,
    pub mean_income: f64,
    pub beta: f64,
    pub utility_kind: String,
    pub lambda: Option<f64>,
    pub mean_subsistence: Option<f64>,
    pub delta: f64,
    pub eps: f64,
    pub horizons: Vec<f64>,
}

/// `bounds`: the obligatory-consumption probe plus the ruin-bound table.
pub fn cmd_bounds(args: &BoundsArgs) -> Result<String, CliError> {
    let utility = utility_from_flags(&args.utility_kind, args.lambda)?;
    let mut doc = Json::object();

    let cap = jensen_cap(&utility, args.mean_income, args.beta)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let probe = obligatory_probe(args.a0, &utility, args.mean_income, args.beta)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let mut obligatory = Json::object();
    obligatory.push("jensen_cap", Json::Float(cap));
    obligatory.push("threshold", Json::Float(probe.threshold));
    obligatory.push("a0", Json::Float(args.a0));
    obligatory.push(
        "immediate_utility",
        Json::Float(utility.eval(args.a0).map_err(|e| CliError::validation(e.to_string()))?),
    );
    obligatory.push(
        "verdict",
        Json::Str(
            match probe.verdict {
                Verdict::ConsumeAllPreferred => "consume_all_preferred",
                Verdict::CapBinding => "cap_binding",
            }
            .into(),
        ),
    );
    doc.push("obligatory", obligatory);

    let mut failed = false;
    match args.mean_subsistence {
        None => {
            doc.push("hoeffding", Json::Null);
        }
        Some(b) => {
            match hoeffding_report(args.a0, args.mean_income, b, args.delta, args.eps) {
                Err(e) => {
                    failed = true;
                    let mut h = Json::object();
                    h.push("error", Json::Str(e.to_string()));
                    doc.push("hoeffding", h);
                }
                Ok(report) => {
                    let mut h = Json::object();
                    h.push("drift", Json::Float(report.drift));
                    h.push("rate", Json::Float(report.rate));
                    h.push("threshold", Json::Float(report.threshold));
                    let mut rows = Vec::new();
                    for &t in &args.horizons {
                        let mut row = Json::object();
                        row.push("T", Json::Float(t));
                        if t > report.threshold {
                            row.push("bound", Json::Float(report.bound_at(t)));
                        } else {
                            failed = true;
                            row.push(
                                "error",
                                Json::Str(format!(
                                    "horizon {t} does not exceed the threshold {}",
                                    report.threshold
                                )),
                            );
                        }
                        rows.push(row);
                    }
                    h.push("bounds", Json::Array(rows));
                    doc.push("hoeffding", h);
                }
            }
        }
    }

    let rendered = doc.render();
    if failed {
        Err(CliError {
            message: "a requested bound is inapplicable; see the report".into(),
            code: 2,
            stdout: Some(rendered),
        })
    } else {
        Ok(rendered)
    }
}

pub struct LookaheadArgs {
    pub ks: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub lemma1_grid: bool,
}

/// `lookahead`: per-k mean utility gaps against the strategy zoo, ratio
/// table, and optionally the full lemma-1 grid check.
pub fn cmd_lookahead(args: &LookaheadArgs) -> Result<String, CliError> {
    if args.ks.is_empty() && !args.lemma1_grid {
        return Err(CliError::validation(
            "nothing to do: pass --k or --lemma1-grid",
        ));
    }
    for &k in &args.ks {
        if k < 2 || k % 2 != 0 {
            return Err(CliError::validation(format!(
                "lookahead length must be even and at least 2, got {k}"
            )));
        }
    }
    let mut doc = Json::object();
    doc.push("samples", Json::UInt(args.samples as u64));
    doc.push("seed", Json::UInt(args.seed));

    let mut gaps = Vec::new();
    let mut means = Vec::new();
    for (i, &k) in args.ks.iter().enumerate() {
        let mut rng = RngStream::new(args.seed, i as u64);
        let est = estimate_gap_against(k, args.samples, &mut rng, false)
            .map_err(|e| CliError::validation(e.to_string()))?;
        let mut row = Json::object();
        row.push("k", Json::UInt(k as u64));
        row.push("mean_gap", Json::Float(est.mean));
        row.push("std_error", Json::Float(est.std_error));
        gaps.push(row);
        means.push((k, est.mean));
    }
    doc.push("gaps", Json::Array(gaps));

    let mut ratios = Vec::new();
    for pair in means.windows(2) {
        let mut row = Json::object();
        row.push("from_k", Json::UInt(pair[0].0 as u64));
        row.push("to_k", Json::UInt(pair[1].0 as u64));
        row.push("ratio", Json::Float(pair[1].1 / pair[0].1));
        ratios.push(row);
    }
    doc.push("ratios", Json::Array(ratios));

    if args.lemma1_grid {
        let mut min_margin = f64::INFINITY;
        for j in 1..=99 {
            for i in 51..=99 {
                let margin = lemma1_margin(j as f64 / 100.0, i as f64 / 100.0)
                    .map_err(|e| CliError::validation(e.to_string()))?;
                min_margin = min_margin.min(margin);
            }
        }
        let mut check = Json::object();
        check.push("grid", Json::Str("w in {0.01..0.99} x a in {0.51..0.99}".into()));
        check.push("min_margin", Json::Float(min_margin));
        check.push("pass", Json::Bool(min_margin >= -1e-12));
        doc.push("lemma1", check);
    } else {
        doc.push("lemma1", Json::Null);
    }
    Ok(doc.render())
}

/// `verify`: named invariant sweeps; exit 0 iff every asserted cell passes.
pub fn cmd_verify(name: &str, seed: u64) -> Result<String, CliError> {
    let (report, pass) = match name {
        "thm1" => verify_thm1(),
        "thm2" => verify_thm2(seed),
        "thm4" => verify_thm4(),
        "thm5" => verify_thm5(),
        "lemma1" => verify_lemma1(),
        other => {
            return Err(CliError::validation(format!(
                "unknown verifier '{other}' (expected thm1, thm2, thm4, thm5, or lemma1)"
            )))
        }
    };
    let rendered = report.render();
    if pass {
        Ok(rendered)
    } else {
        Err(CliError {
            message: format!("verifier '{name}' failed"),
            code: 4,
            stdout: Some(rendered),
        })
    }
}

fn report_header(name: &str) -> Json {
    let mut doc = Json::object();
    doc.push("verifier", Json::Str(name.into()));
    doc
}

/// Consume-all verdicts match the threshold comparison, and truncated
/// constant-consumption utility never beats the cap.
fn verify_thm1() -> (Json, bool) {
    let mut doc = report_header("thm1");
    let mut cells = Vec::new();
    let mut pass = true;
    let utilities = [
        ("sqrt", UtilityFunction::Sqrt),
        (
            "isoelastic_unshifted(0.5)",
            UtilityFunction::isoelastic_unshifted(0.5).unwrap(),
        ),
    ];
    for (uname, u) in &utilities {
        for &mean_income in &[0.5, 1.0, 2.0] {
            for &beta in &[0.3, 0.5, 0.9] {
                let cap = jensen_cap(u, mean_income, beta).unwrap();
                let threshold = u.invert(cap).unwrap();
                for &scale in &[0.25, 0.999, 1.0, 1.001, 4.0] {
                    let a0 = threshold * scale;
                    let probe = obligatory_probe(a0, u, mean_income, beta).unwrap();
                    let expect_consume_all = a0 > threshold;
                    let verdict_ok = (probe.verdict == Verdict::ConsumeAllPreferred)
                        == expect_consume_all;
                    // Partial sums of the constant plan stay below the cap.
                    let series = vec![mean_income; 400];
                    let mut cap_ok = true;
                    for n in [1usize, 10, 100, 400] {
                        let partial =
                            ruinlab::discounted_utility(&series[..n], beta, u).unwrap();
                        cap_ok &= partial <= cap + 1e-9 * cap.abs().max(1.0);
                    }
                    let ok = verdict_ok && cap_ok;
                    pass &= ok;
                    let mut cell = Json::object();
                    cell.push("utility", Json::Str((*uname).into()));
                    cell.push("mean_income", Json::Float(mean_income));
                    cell.push("beta", Json::Float(beta));
                    cell.push("a0", Json::Float(a0));
                    cell.push("threshold", Json::Float(threshold));
                    cell.push("verdict_consistent", Json::Bool(verdict_ok));
                    cell.push("cap_dominates", Json::Bool(cap_ok));
                    cell.push("pass", Json::Bool(ok));
                    cells.push(cell);
                }
            }
        }
    }
    doc.push("cells", Json::Array(cells));
    doc.push("pass", Json::Bool(pass));
    (doc, pass)
}

/// Monte Carlo survival under the binding floor vs the exponential bound.
fn verify_thm2(seed: u64) -> (Json, bool) {
    let (a0, y_mean, b_mean, eps, delta) = (2.0, 1.0, 1.2, 0.1, 0.1);
    let n_agents = 20_000usize;
    let config = CohortConfig::new(
        Scenario::Impulsive {
            policy: None,
            subsistence: SubsistenceProcess::bounded_uniform(b_mean, delta).unwrap(),
        },
        n_agents,
        40,
        seed,
        ModelParams::new(0.9, 1.0, a0).unwrap(),
        IncomeProcess::bounded_uniform(y_mean, eps).unwrap(),
    )
    .unwrap();
    let histogram = run_cohort(&config);
    let report = hoeffding_report(a0, y_mean, b_mean, delta, eps).unwrap();

    let mut doc = report_header("thm2");
    doc.push("n_agents", Json::UInt(n_agents as u64));
    doc.push("rate", Json::Float(report.rate));
    doc.push("threshold", Json::Float(report.threshold));
    let mut cells = Vec::new();
    let mut pass = true;
    let n = n_agents as f64;
    for t in [24usize, 32, 40] {
        let bound = report.bound_at(t as f64);
        let slack = 3.0 * (bound * (1.0 - bound) / n).sqrt() + 1.0 / n.sqrt();
        let survived = histogram.survivor_fraction_at(t);
        let ok = survived <= bound + slack;
        pass &= ok;
        let mut cell = Json::object();
        cell.push("T", Json::UInt(t as u64));
        cell.push("bound", Json::Float(bound));
        cell.push("slack", Json::Float(slack));
        cell.push("survivor_fraction", Json::Float(survived));
        cell.push("pass", Json::Bool(ok));
        cells.push(cell);
    }
    doc.push("cells", Json::Array(cells));
    doc.push("pass", Json::Bool(pass));
    (doc, pass)
}

/// Non-negativity of both terminal-consumption improvement constructions
/// across the full parameter sweep.
fn verify_thm4() -> (Json, bool) {
    let utilities = [
        ("sqrt", UtilityFunction::Sqrt),
        (
            "isoelastic_unshifted(0.3)",
            UtilityFunction::isoelastic_unshifted(0.3).unwrap(),
        ),
        (
            "isoelastic_unshifted(0.5)",
            UtilityFunction::isoelastic_unshifted(0.5).unwrap(),
        ),
        (
            "isoelastic_unshifted(0.7)",
            UtilityFunction::isoelastic_unshifted(0.7).unwrap(),
        ),
    ];
    let betas: Vec<f64> = (0..25).map(|i| 0.51 + 0.02 * i as f64).collect();
    let mut doc = report_header("thm4");
    let mut cells = Vec::new();
    let mut pass = true;
    for (uname, u) in &utilities {
        for &b in &[0.1, 1.0, 10.0] {
            let mut min_case1 = f64::INFINITY;
            let mut min_case2 = f64::INFINITY;
            for &beta in &betas {
                for i in 0..=32 {
                    let c1 = 2.0 * b + 8.0 * b * i as f64 / 32.0;
                    min_case1 = min_case1.min(improve_case1(c1, b, beta, u).unwrap());
                    if i < 32 {
                        let c2 = b + b * i as f64 / 32.0;
                        min_case2 = min_case2.min(improve_case2(c2, b, beta, u).unwrap());
                    }
                }
            }
            let ok = min_case1 >= -1e-12 && min_case2 >= -1e-12;
            pass &= ok;
            let mut cell = Json::object();
            cell.push("utility", Json::Str((*uname).into()));
            cell.push("b", Json::Float(b));
            cell.push("min_case1_gain", Json::Float(min_case1));
            cell.push("min_case2_gain", Json::Float(min_case2));
            cell.push("pass", Json::Bool(ok));
            cells.push(cell);
        }
    }
    doc.push("cells", Json::Array(cells));
    doc.push("pass", Json::Bool(pass));
    (doc, pass)
}

/// First-order-condition residuals of the split point, plus the split-gain
/// sign: asserted for the unshifted form with lambda < 1, informational
/// for the shifted form and for lambda > 1.
fn verify_thm5() -> (Json, bool) {
    let mut doc = report_header("thm5");
    let mut cells = Vec::new();
    let mut pass = true;
    for &lambda in &[0.3, 0.5, 0.7, 2.0, 3.0] {
        for &c_t in &[0.5, 1.0, 5.0] {
            for &beta in &[0.51, 0.7, 0.9] {
                let eps = isoelastic_split_epsilon(c_t, beta, lambda).unwrap();
                let rhs = (c_t - eps).powf(-lambda);
                let residual = (beta * eps.powf(-lambda) - rhs).abs() / rhs;
                let foc_ok = residual <= 1e-9;
                let unshifted = UtilityFunction::isoelastic_unshifted(lambda).unwrap();
                let shifted = UtilityFunction::isoelastic_shifted(lambda).unwrap();
                let unshifted_gain = split_gain(c_t, beta, &unshifted, eps).unwrap();
                let shifted_gain = split_gain(c_t, beta, &shifted, eps).unwrap();
                let asserted = lambda < 1.0;
                let gain_ok = !asserted || unshifted_gain >= 0.0;
                pass &= foc_ok && gain_ok;

                let mut cell = Json::object();
                cell.push("lambda", Json::Float(lambda));
                cell.push("c_terminal", Json::Float(c_t));
                cell.push("beta", Json::Float(beta));
                cell.push("split_epsilon", Json::Float(eps));
                cell.push("foc_residual_rel", Json::Float(residual));
                cell.push("unshifted_gain", Json::Float(unshifted_gain));
                cell.push("shifted_gain_informational", Json::Float(shifted_gain));
                cell.push("asserted", Json::Bool(asserted));
                cell.push("pass", Json::Bool(foc_ok && gain_ok));
                cells.push(cell);
            }
        }
    }
    doc.push("cells", Json::Array(cells));
    doc.push("pass", Json::Bool(pass));
    (doc, pass)
}

fn verify_lemma1() -> (Json, bool) {
    let mut min_margin = f64::INFINITY;
    let mut worst = (0.0, 0.0);
    for j in 1..=99 {
        let w = j as f64 / 100.0;
        for i in 51..=99 {
            let a = i as f64 / 100.0;
            let margin = lemma1_margin(w, a).unwrap();
            if margin < min_margin {
                min_margin = margin;
                worst = (w, a);
            }
        }
    }
    let pass = min_margin >= -1e-12;
    let mut doc = report_header("lemma1");
    doc.push("grid", Json::Str("w in {0.01..0.99} x a in {0.51..0.99}".into()));
    doc.push("min_margin", Json::Float(min_margin));
    doc.push("argmin_w", Json::Float(worst.0));
    doc.push("argmin_a", Json::Float(worst.1));
    doc.push("pass", Json::Bool(pass));
    (doc, pass)
}

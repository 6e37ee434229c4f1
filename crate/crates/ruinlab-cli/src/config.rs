//! Declarative run configuration.
//!
//! The document format is sectioned key-value text:
//!
//! ```text
//! [scenario]
//! preset = general
//! [simulation]
//! n_agents = 5000
//! ```
//!
//! Sections: [utility], [model], [income], [subsistence], [scenario],
//! [grid], [simulation], [output]. Unknown sections or keys are errors, as
//! are duplicate keys. `#` starts a comment line. A `preset` key in
//! [scenario] applies a calibrated bundle (utility, model, income,
//! subsistence, impulsive scenario); per-key overrides apply on top of it
//! for scalar sections, while [utility], [income], and [subsistence]
//! replace the preset block wholesale when present.
//!
//! `parse_config` resolves every default eagerly, so `normalize()` echoes a
//! complete document that parses back to the identical configuration.

use std::collections::BTreeMap;
use std::fmt;

use ruinlab::cohort::Preset;
use ruinlab::solver::GridSpec;
use ruinlab::{IncomeProcess, ModelParams, SubsistenceProcess, UtilityFunction};

use crate::emit::fmt_f64;

/// Parse or validation failure with document context.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: None,
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: Some(line),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ruinlab::Error> for ConfigError {
    fn from(e: ruinlab::Error) -> Self {
        ConfigError::new(e.to_string())
    }
}

/// What the cohort does each period (resolved, but before any solving).
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    Obligatory { c_fixed: f64 },
    /// `use_policy = false` makes the floor bind exactly (c_t = b_t).
    Impulsive { use_policy: bool },
    TrueAgency,
    /// Policy tables loaded from a solver CSV artifact.
    Custom { policy_file: String },
}

impl ScenarioConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScenarioConfig::Obligatory { .. } => "obligatory",
            ScenarioConfig::Impulsive { .. } => "impulsive",
            ScenarioConfig::TrueAgency => "true_agency",
            ScenarioConfig::Custom { .. } => "custom",
        }
    }

    /// Whether running this scenario requires a solved policy.
    pub fn needs_policy(&self) -> bool {
        match self {
            ScenarioConfig::Obligatory { .. } => false,
            ScenarioConfig::Impulsive { use_policy } => *use_policy,
            ScenarioConfig::TrueAgency => true,
            ScenarioConfig::Custom { .. } => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Tables as CSV plus a JSON sidecar (default).
    Csv,
    /// Everything in a single JSON document.
    Json,
}

impl OutputFormat {
    fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub utility: UtilityFunction,
    pub model: ModelParams,
    pub income: IncomeProcess,
    pub subsistence: Option<SubsistenceProcess>,
    pub scenario: ScenarioConfig,
    pub grid: GridSpec,
    pub n_agents: usize,
    pub horizon: usize,
    pub master_seed: u64,
    pub format: OutputFormat,
    pub output_path: String,
}

const SECTIONS: [&str; 8] = [
    "utility",
    "model",
    "income",
    "subsistence",
    "scenario",
    "grid",
    "simulation",
    "output",
];

const KEYS: [(&str, &[&str]); 8] = [
    ("utility", &["kind", "lambda"]),
    ("model", &["beta", "return_rate", "initial_assets"]),
    ("income", &["kind", "mean", "std", "half_width", "sequence", "k"]),
    ("subsistence", &["kind", "mean", "std", "half_width"]),
    ("scenario", &["preset", "kind", "c_fixed", "use_policy", "policy_file"]),
    (
        "grid",
        &[
            "a_min",
            "a_max",
            "n_points",
            "n_consumption_points",
            "n_income_nodes",
            "tolerance",
            "max_iterations",
            "c_floor",
        ],
    ),
    ("simulation", &["n_agents", "horizon", "master_seed"]),
    ("output", &["format", "path"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

type Sections = BTreeMap<String, BTreeMap<String, Entry>>;

fn split_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line_no, format!("malformed section header '{raw}'")))?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::at(line_no, format!("unknown section [{name}]")));
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::at(line_no, format!("expected 'key = value', got '{raw}'"))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let section = current
            .clone()
            .ok_or_else(|| ConfigError::at(line_no, format!("key '{key}' before any section")))?;
        let allowed = KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, keys)| *keys)
            .unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::at(
                line_no,
                format!("unknown key '{key}' in [{section}]"),
            ));
        }
        let slot = sections.entry(section.clone()).or_default();
        if slot.contains_key(&key) {
            return Err(ConfigError::at(
                line_no,
                format!("duplicate key '{key}' in [{section}]"),
            ));
        }
        slot.insert(key, Entry { value, line: line_no });
    }
    Ok(sections)
}

struct SectionView<'a> {
    name: &'a str,
    entries: Option<&'a BTreeMap<String, Entry>>,
}

impl<'a> SectionView<'a> {
    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.and_then(|m| m.get(key))
    }

    fn is_present(&self) -> bool {
        self.entries.map(|m| !m.is_empty()).unwrap_or(false)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(entry) => {
                let parsed: f64 = entry.value.parse().map_err(|_| {
                    ConfigError::at(
                        entry.line,
                        format!("key '{key}' in [{}] expects a number, got '{}'", self.name, entry.value),
                    )
                })?;
                if !parsed.is_finite() {
                    return Err(ConfigError::at(
                        entry.line,
                        format!("key '{key}' in [{}] must be finite", self.name),
                    ));
                }
                Ok(Some(parsed))
            }
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(entry) => entry.value.parse().map(Some).map_err(|_| {
                ConfigError::at(
                    entry.line,
                    format!("key '{key}' in [{}] expects a non-negative integer, got '{}'", self.name, entry.value),
                )
            }),
        }
    }

    fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(entry) => entry.value.parse().map(Some).map_err(|_| {
                ConfigError::at(
                    entry.line,
                    format!("key '{key}' in [{}] expects a non-negative integer, got '{}'", self.name, entry.value),
                )
            }),
        }
    }

    fn bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(entry) => match entry.value.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                other => Err(ConfigError::at(
                    entry.line,
                    format!("key '{key}' in [{}] expects true or false, got '{other}'", self.name),
                )),
            },
        }
    }

    fn str(&self, key: &str) -> Option<(&'a str, usize)> {
        self.get(key).map(|e| (e.value.as_str(), e.line))
    }

    fn require_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?.ok_or_else(|| {
            ConfigError::new(format!("missing required key '{key}' in [{}]", self.name))
        })
    }
}

fn view<'a>(sections: &'a Sections, name: &'a str) -> SectionView<'a> {
    SectionView {
        name,
        entries: sections.get(name),
    }
}

fn parse_utility(section: &SectionView<'_>) -> Result<UtilityFunction, ConfigError> {
    let (kind, line) = section
        .str("kind")
        .ok_or_else(|| ConfigError::new("missing required key 'kind' in [utility]"))?;
    let lambda = section.f64("lambda")?;
    let requires_lambda = matches!(kind, "isoelastic_shifted" | "isoelastic_unshifted");
    if requires_lambda && lambda.is_none() {
        return Err(ConfigError::at(line, format!("utility kind '{kind}' requires 'lambda'")));
    }
    if !requires_lambda && lambda.is_some() {
        return Err(ConfigError::at(line, format!("utility kind '{kind}' does not take 'lambda'")));
    }
    match kind {
        "sqrt" => Ok(UtilityFunction::Sqrt),
        "log" => Ok(UtilityFunction::Log),
        "isoelastic_shifted" => Ok(UtilityFunction::isoelastic_shifted(lambda.unwrap())?),
        "isoelastic_unshifted" => Ok(UtilityFunction::isoelastic_unshifted(lambda.unwrap())?),
        other => Err(ConfigError::at(line, format!("unknown utility kind '{other}'"))),
    }
}

fn parse_income(section: &SectionView<'_>) -> Result<IncomeProcess, ConfigError> {
    let (kind, line) = section
        .str("kind")
        .ok_or_else(|| ConfigError::new("missing required key 'kind' in [income]"))?;
    match kind {
        "constant" => Ok(IncomeProcess::constant(section.require_f64("mean")?)?),
        "lognormal" => Ok(IncomeProcess::lognormal(
            section.require_f64("mean")?,
            section.require_f64("std")?,
        )?),
        "bounded_uniform" => Ok(IncomeProcess::bounded_uniform(
            section.require_f64("mean")?,
            section.require_f64("half_width")?,
        )?),
        "fixed_sequence" => {
            let (text, seq_line) = section
                .str("sequence")
                .ok_or_else(|| ConfigError::new("income kind 'fixed_sequence' requires 'sequence'"))?;
            let mut values = Vec::new();
            for part in text.split(',') {
                let v: f64 = part.trim().parse().map_err(|_| {
                    ConfigError::at(seq_line, format!("bad sequence entry '{}'", part.trim()))
                })?;
                values.push(v);
            }
            Ok(IncomeProcess::fixed_sequence(values)?)
        }
        "lookahead" => {
            let k = section
                .usize("k")?
                .ok_or_else(|| ConfigError::new("income kind 'lookahead' requires 'k'"))?;
            Ok(IncomeProcess::lookahead_phases(k)?)
        }
        other => Err(ConfigError::at(line, format!("unknown income kind '{other}'"))),
    }
}

fn parse_subsistence(section: &SectionView<'_>) -> Result<SubsistenceProcess, ConfigError> {
    let (kind, line) = section
        .str("kind")
        .ok_or_else(|| ConfigError::new("missing required key 'kind' in [subsistence]"))?;
    match kind {
        "constant" => Ok(SubsistenceProcess::constant(section.require_f64("mean")?)?),
        "bounded_uniform" => Ok(SubsistenceProcess::bounded_uniform(
            section.require_f64("mean")?,
            section.require_f64("half_width")?,
        )?),
        "lognormal" => Ok(SubsistenceProcess::lognormal(
            section.require_f64("mean")?,
            section.require_f64("std")?,
        )?),
        other => Err(ConfigError::at(line, format!("unknown subsistence kind '{other}'"))),
    }
}

/// Parses and fully resolves a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let sections = split_sections(text)?;

    let scenario_section = view(&sections, "scenario");
    let preset = match scenario_section.str("preset") {
        Some((name, line)) => Some(
            Preset::from_name(name).map_err(|e| ConfigError::at(line, e.to_string()))?,
        ),
        None => None,
    };
    let calibration = preset.map(|p| p.calibration());

    // Utility: explicit section replaces the preset's wholesale.
    let utility_section = view(&sections, "utility");
    let utility = if utility_section.is_present() {
        parse_utility(&utility_section)?
    } else if let Some(cal) = &calibration {
        cal.utility()
    } else {
        return Err(ConfigError::new(
            "missing [utility] section (or a preset supplying it)",
        ));
    };

    // Model: per-key overrides on top of the preset.
    let model_section = view(&sections, "model");
    let beta = match model_section.f64("beta")? {
        Some(b) => b,
        None => calibration
            .as_ref()
            .map(|c| c.beta)
            .ok_or_else(|| ConfigError::new("missing required key 'beta' in [model]"))?,
    };
    let return_rate = model_section
        .f64("return_rate")?
        .or(calibration.as_ref().map(|c| c.return_rate))
        .unwrap_or(1.0);
    let initial_assets = match model_section.f64("initial_assets")? {
        Some(a) => a,
        None => calibration
            .as_ref()
            .map(|c| c.initial_assets)
            .ok_or_else(|| ConfigError::new("missing required key 'initial_assets' in [model]"))?,
    };
    let model = ModelParams::new(beta, return_rate, initial_assets)?;

    // Income and subsistence: explicit sections replace the preset's.
    let income_section = view(&sections, "income");
    let income = if income_section.is_present() {
        parse_income(&income_section)?
    } else if let Some(cal) = &calibration {
        cal.income()
    } else {
        return Err(ConfigError::new(
            "missing [income] section (or a preset supplying it)",
        ));
    };
    let subsistence_section = view(&sections, "subsistence");
    let subsistence = if subsistence_section.is_present() {
        Some(parse_subsistence(&subsistence_section)?)
    } else {
        calibration.as_ref().map(|c| c.subsistence())
    };

    // Scenario: preset default is the policy-backed impulsive run.
    let scenario = match scenario_section.str("kind") {
        None if preset.is_some() => ScenarioConfig::Impulsive {
            use_policy: scenario_section.bool("use_policy")?.unwrap_or(true),
        },
        None => {
            return Err(ConfigError::new(
                "missing required key 'kind' in [scenario]",
            ))
        }
        Some(("obligatory", _)) => ScenarioConfig::Obligatory {
            c_fixed: scenario_section.require_f64("c_fixed")?,
        },
        Some(("impulsive", _)) => ScenarioConfig::Impulsive {
            use_policy: scenario_section.bool("use_policy")?.unwrap_or(true),
        },
        Some(("true_agency", _)) => ScenarioConfig::TrueAgency,
        Some(("custom", line)) => ScenarioConfig::Custom {
            policy_file: scenario_section
                .str("policy_file")
                .map(|(s, _)| s.to_string())
                .ok_or_else(|| {
                    ConfigError::at(line, "scenario kind 'custom' requires 'policy_file'")
                })?,
        },
        Some((other, line)) => {
            return Err(ConfigError::at(line, format!("unknown scenario kind '{other}'")))
        }
    };
    if matches!(scenario, ScenarioConfig::Impulsive { .. }) && subsistence.is_none() {
        return Err(ConfigError::new(
            "the impulsive scenario requires a [subsistence] section",
        ));
    }

    // Grid: defaults derived from the resolved model/income/utility.
    let grid_section = view(&sections, "grid");
    let mut grid = GridSpec::default_for(&model, &income, &utility);
    if let Some(v) = grid_section.f64("a_min")? {
        grid.a_min = v;
    }
    if let Some(v) = grid_section.f64("a_max")? {
        grid.a_max = v;
    }
    if let Some(v) = grid_section.usize("n_points")? {
        grid.n_points = v;
    }
    if let Some(v) = grid_section.usize("n_consumption_points")? {
        grid.n_consumption_points = v;
    }
    if let Some(v) = grid_section.usize("n_income_nodes")? {
        grid.n_income_nodes = v;
    }
    if let Some(v) = grid_section.f64("tolerance")? {
        grid.tolerance = v;
    }
    if let Some(v) = grid_section.usize("max_iterations")? {
        grid.max_iterations = v;
    }
    let c_floor = match grid_section.f64("c_floor")? {
        Some(v) => v,
        None => grid.effective_c_floor(),
    };
    grid.c_floor = Some(c_floor);

    let simulation = view(&sections, "simulation");
    let n_agents = simulation.usize("n_agents")?.unwrap_or(50_000);
    let horizon = simulation.usize("horizon")?.unwrap_or(100);
    let master_seed = simulation.u64("master_seed")?.unwrap_or(0);
    if n_agents == 0 {
        return Err(ConfigError::new("n_agents must be at least 1"));
    }
    if horizon == 0 {
        return Err(ConfigError::new("horizon must be at least 1"));
    }

    let output = view(&sections, "output");
    let format = match output.str("format") {
        None => OutputFormat::Csv,
        Some(("csv", _)) => OutputFormat::Csv,
        Some(("json", _)) => OutputFormat::Json,
        Some((other, line)) => {
            return Err(ConfigError::at(line, format!("unknown output format '{other}'")))
        }
    };
    let output_path = output
        .str("path")
        .map(|(s, _)| s.to_string())
        .unwrap_or_else(|| "ruinlab_run".to_string());

    Ok(RunConfig {
        utility,
        model,
        income,
        subsistence,
        scenario,
        grid,
        n_agents,
        horizon,
        master_seed,
        format,
        output_path,
    })
}

impl RunConfig {
    /// Canonical dump: every resolved value, fixed section and key order.
    /// Parsing the dump reproduces the identical configuration.
    pub fn normalize(&self) -> String {
        let mut out = String::new();
        out.push_str("[utility]\n");
        match &self.utility {
            UtilityFunction::Sqrt => out.push_str("kind = sqrt\n"),
            UtilityFunction::Log => out.push_str("kind = log\n"),
            UtilityFunction::IsoelasticShifted { lambda } => {
                out.push_str("kind = isoelastic_shifted\n");
                out.push_str(&format!("lambda = {}\n", fmt_f64(*lambda)));
            }
            UtilityFunction::IsoelasticUnshifted { lambda } => {
                out.push_str("kind = isoelastic_unshifted\n");
                out.push_str(&format!("lambda = {}\n", fmt_f64(*lambda)));
            }
        }
        out.push_str("[model]\n");
        out.push_str(&format!("beta = {}\n", fmt_f64(self.model.beta)));
        out.push_str(&format!("return_rate = {}\n", fmt_f64(self.model.return_rate)));
        out.push_str(&format!(
            "initial_assets = {}\n",
            fmt_f64(self.model.initial_assets)
        ));
        out.push_str("[income]\n");
        match &self.income {
            IncomeProcess::Constant { mean } => {
                out.push_str("kind = constant\n");
                out.push_str(&format!("mean = {}\n", fmt_f64(*mean)));
            }
            IncomeProcess::Lognormal { mean, std } => {
                out.push_str("kind = lognormal\n");
                out.push_str(&format!("mean = {}\n", fmt_f64(*mean)));
                out.push_str(&format!("std = {}\n", fmt_f64(*std)));
            }
            IncomeProcess::BoundedUniform { mean, half_width } => {
                out.push_str("kind = bounded_uniform\n");
                out.push_str(&format!("mean = {}\n", fmt_f64(*mean)));
                out.push_str(&format!("half_width = {}\n", fmt_f64(*half_width)));
            }
            IncomeProcess::FixedSequence { values } => {
                out.push_str("kind = fixed_sequence\n");
                let parts: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
                out.push_str(&format!("sequence = {}\n", parts.join(", ")));
            }
            IncomeProcess::LookaheadPhases { k } => {
                out.push_str("kind = lookahead\n");
                out.push_str(&format!("k = {k}\n"));
            }
        }
        if let Some(sub) = &self.subsistence {
            out.push_str("[subsistence]\n");
            match sub {
                SubsistenceProcess::Constant { mean } => {
                    out.push_str("kind = constant\n");
                    out.push_str(&format!("mean = {}\n", fmt_f64(*mean)));
                }
                SubsistenceProcess::BoundedUniform { mean, half_width } => {
                    out.push_str("kind = bounded_uniform\n");
                    out.push_str(&format!("mean = {}\n", fmt_f64(*mean)));
                    out.push_str(&format!("half_width = {}\n", fmt_f64(*half_width)));
                }
                SubsistenceProcess::Lognormal { mean, std } => {
                    out.push_str("kind = lognormal\n");
                    out.push_str(&format!("mean = {}\n", fmt_f64(*mean)));
                    out.push_str(&format!("std = {}\n", fmt_f64(*std)));
                }
            }
        }
        out.push_str("[scenario]\n");
        out.push_str(&format!("kind = {}\n", self.scenario.kind_name()));
        match &self.scenario {
            ScenarioConfig::Obligatory { c_fixed } => {
                out.push_str(&format!("c_fixed = {}\n", fmt_f64(*c_fixed)));
            }
            ScenarioConfig::Impulsive { use_policy } => {
                out.push_str(&format!("use_policy = {use_policy}\n"));
            }
            ScenarioConfig::TrueAgency => {}
            ScenarioConfig::Custom { policy_file } => {
                out.push_str(&format!("policy_file = {policy_file}\n"));
            }
        }
        out.push_str("[grid]\n");
        out.push_str(&format!("a_min = {}\n", fmt_f64(self.grid.a_min)));
        out.push_str(&format!("a_max = {}\n", fmt_f64(self.grid.a_max)));
        out.push_str(&format!("n_points = {}\n", self.grid.n_points));
        out.push_str(&format!(
            "n_consumption_points = {}\n",
            self.grid.n_consumption_points
        ));
        out.push_str(&format!("n_income_nodes = {}\n", self.grid.n_income_nodes));
        out.push_str(&format!("tolerance = {}\n", fmt_f64(self.grid.tolerance)));
        out.push_str(&format!("max_iterations = {}\n", self.grid.max_iterations));
        out.push_str(&format!(
            "c_floor = {}\n",
            fmt_f64(self.grid.effective_c_floor())
        ));
        out.push_str("[simulation]\n");
        out.push_str(&format!("n_agents = {}\n", self.n_agents));
        out.push_str(&format!("horizon = {}\n", self.horizon));
        out.push_str(&format!("master_seed = {}\n", self.master_seed));
        out.push_str("[output]\n");
        out.push_str(&format!("format = {}\n", self.format.name()));
        out.push_str(&format!("path = {}\n", self.output_path));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_document_resolves_the_calibration() {
        let cfg = parse_config("[scenario]\npreset = general\n").unwrap();
        assert_eq!(cfg.model.beta, 0.95);
        assert_eq!(cfg.model.initial_assets, 141_140.0);
        assert_eq!(
            cfg.income,
            IncomeProcess::lognormal(5957.25, 378.74).unwrap()
        );
        assert_eq!(
            cfg.subsistence,
            Some(SubsistenceProcess::lognormal(5253.0, 0.2 * 5253.0).unwrap())
        );
        assert_eq!(cfg.scenario, ScenarioConfig::Impulsive { use_policy: true });
        assert_eq!(cfg.n_agents, 50_000);
        assert_eq!(cfg.horizon, 100);
        assert_eq!(cfg.grid.n_points, 2001);
    }

    #[test]
    fn invariant_violations_name_the_bound() {
        let err = parse_config(
            "[scenario]\npreset = general\n[model]\nbeta = 1.2\n",
        )
        .unwrap_err();
        assert!(err.message.contains("(0, 1)"), "message: {}", err.message);
    }

    #[test]
    fn unknown_keys_are_rejected_with_context() {
        let err = parse_config("[model]\nbta = 0.9\n").unwrap_err();
        assert!(err.message.contains("bta"));
        assert_eq!(err.line, Some(2));

        let err = parse_config("[models]\nbeta = 0.9\n").unwrap_err();
        assert!(err.message.contains("unknown section"));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("[model]\nbeta = 0.9\nbeta = 0.8\n").unwrap_err();
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn normalized_dump_round_trips() {
        let text = "\
[scenario]
preset = high_income
[simulation]
n_agents = 500
horizon = 60
master_seed = 17
[output]
path = out/high
";
        let cfg = parse_config(text).unwrap();
        let dump = cfg.normalize();
        let reparsed = parse_config(&dump).unwrap();
        assert_eq!(reparsed, cfg);
        assert_eq!(reparsed.normalize(), dump);
    }

    #[test]
    fn explicit_sections_replace_preset_blocks() {
        let text = "\
[scenario]
preset = general
[utility]
kind = sqrt
[income]
kind = constant
mean = 10
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.utility, UtilityFunction::Sqrt);
        assert_eq!(cfg.income, IncomeProcess::constant(10.0).unwrap());
        // Preset model still applies.
        assert_eq!(cfg.model.beta, 0.95);
    }

    #[test]
    fn lambda_only_for_isoelastic_kinds() {
        let err = parse_config(
            "[utility]\nkind = sqrt\nlambda = 2\n[model]\nbeta = 0.9\ninitial_assets = 1\n[income]\nkind = constant\nmean = 1\n[scenario]\nkind = true_agency\n",
        )
        .unwrap_err();
        assert!(err.message.contains("does not take"));

        let err = parse_config(
            "[utility]\nkind = isoelastic_shifted\n[model]\nbeta = 0.9\ninitial_assets = 1\n[income]\nkind = constant\nmean = 1\n[scenario]\nkind = true_agency\n",
        )
        .unwrap_err();
        assert!(err.message.contains("requires 'lambda'"));
    }

    #[test]
    fn impulsive_without_subsistence_is_rejected() {
        let err = parse_config(
            "[utility]\nkind = sqrt\n[model]\nbeta = 0.9\ninitial_assets = 5\n[income]\nkind = constant\nmean = 1\n[scenario]\nkind = impulsive\n",
        )
        .unwrap_err();
        assert!(err.message.contains("subsistence"));
    }

    #[test]
    fn fixed_sequence_income_parses() {
        let cfg = parse_config(
            "[utility]\nkind = sqrt\n[model]\nbeta = 0.9\ninitial_assets = 5\n[income]\nkind = fixed_sequence\nsequence = 1.5, 2, 0.25\n[scenario]\nkind = obligatory\nc_fixed = 1\n",
        )
        .unwrap();
        assert_eq!(
            cfg.income,
            IncomeProcess::fixed_sequence(vec![1.5, 2.0, 0.25]).unwrap()
        );
    }
}

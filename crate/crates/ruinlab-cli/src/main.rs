use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ruinlab_cli::config::{parse_config, RunConfig};
use ruinlab_cli::run::{
    cmd_bounds, cmd_lookahead, cmd_simulate, cmd_solve, cmd_verify, BoundsArgs, CliError,
    LookaheadArgs,
};

/// Consumption-savings experiments under bounded agency: optimal policies by
/// value iteration, ruin-bound reports, lookahead-gap estimates, and seeded
/// cohort simulations.
#[derive(Parser)]
#[command(name = "ruinlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured consumption policy and write its tables.
    Solve {
        /// Configuration document.
        #[arg(long)]
        config: PathBuf,
        /// Override the [output] path.
        #[arg(long)]
        output: Option<String>,
    },
    /// Run the configured cohort and write the ruin histogram and summary.
    Simulate {
        /// Configuration document.
        #[arg(long)]
        config: PathBuf,
        /// Override the [output] path.
        #[arg(long)]
        output: Option<String>,
        /// Override [simulation] n_agents.
        #[arg(long)]
        n_agents: Option<usize>,
        /// Override [simulation] horizon.
        #[arg(long)]
        horizon: Option<usize>,
        /// Override [simulation] master_seed.
        #[arg(long)]
        master_seed: Option<u64>,
    },
    /// Print the obligatory-consumption probe and the ruin-bound table.
    Bounds {
        /// Initial assets.
        #[arg(long)]
        a0: f64,
        /// Mean income Y.
        #[arg(long = "Y")]
        mean_income: f64,
        /// Discount factor.
        #[arg(long)]
        beta: f64,
        /// Utility kind: sqrt, log, isoelastic_shifted, isoelastic_unshifted.
        #[arg(long, default_value = "sqrt")]
        utility: String,
        /// Exponent for the isoelastic kinds.
        #[arg(long)]
        lambda: Option<f64>,
        /// Mean subsistence B; enables the ruin-bound section.
        #[arg(long = "B")]
        mean_subsistence: Option<f64>,
        /// Half-width of the subsistence support.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Half-width of the income support.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Horizons to tabulate the bound at (comma separated).
        #[arg(long = "T", value_delimiter = ',')]
        horizons: Vec<f64>,
    },
    /// Estimate lookahead utility gaps and check the lemma-1 grid.
    Lookahead {
        /// Instance lengths (comma separated, even).
        #[arg(long = "k", value_delimiter = ',')]
        ks: Vec<usize>,
        /// Monte Carlo sample count per k.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Master seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the full lemma-1 margin grid.
        #[arg(long)]
        lemma1_grid: bool,
    },
    /// Run a named verification sweep: thm1, thm2, thm4, thm5, or lemma1.
    Verify {
        name: String,
        /// Master seed for Monte Carlo verifiers.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config '{}': {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::validation(e.to_string()))
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Solve { config, output } => {
            let mut cfg = load_config(&config)?;
            if let Some(path) = output {
                cfg.output_path = path;
            }
            cmd_solve(&cfg)
        }
        Command::Simulate {
            config,
            output,
            n_agents,
            horizon,
            master_seed,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(path) = output {
                cfg.output_path = path;
            }
            if let Some(n) = n_agents {
                cfg.n_agents = n;
            }
            if let Some(h) = horizon {
                cfg.horizon = h;
            }
            if let Some(s) = master_seed {
                cfg.master_seed = s;
            }
            cmd_simulate(&cfg)
        }
        Command::Bounds {
            a0,
            mean_income,
            beta,
            utility,
            lambda,
            mean_subsistence,
            delta,
            eps,
            horizons,
        } => cmd_bounds(&BoundsArgs {
            a0,
            mean_income,
            beta,
            utility_kind: utility,
            lambda,
            mean_subsistence,
            delta,
            eps,
            horizons,
        }),
        Command::Lookahead {
            ks,
            samples,
            seed,
            lemma1_grid,
        } => cmd_lookahead(&LookaheadArgs {
            ks,
            samples,
            seed,
            lemma1_grid,
        }),
        Command::Verify { name, seed } => cmd_verify(&name, seed),
    }
}

fn main() -> ExitCode {
    // RUINLAB_THREADS caps worker parallelism; unset means hardware default.
    if let Ok(value) = std::env::var("RUINLAB_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: RUINLAB_THREADS must be a positive integer, got '{value}'");
                return ExitCode::from(2);
            }
        }
    }

    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            if let Some(stdout) = &err.stdout {
                print!("{stdout}");
            }
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code.clamp(0, 255) as u8)
        }
    }
}

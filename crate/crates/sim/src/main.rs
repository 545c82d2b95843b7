//! Batch experiment driver for the carrier power-setting game: builds
//! scenarios, calibrates the interference price, runs the best-reply
//! solver and the comparison strategies, sweeps cost parameters, and
//! cross-checks against exhaustive search.

mod commands;
mod config;
mod io;

use clap::{Parser, Subcommand};

use commands::{CommandError, Context, StrategyArg, SweepParameter};
use config::{ExperimentConfig, XiMode};

#[derive(Parser)]
#[command(name = "capow", version, about = "Downlink power-setting game simulator")]
struct Cli {
    /// TOML experiment configuration; defaults used when omitted.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Scenario seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Team count override (nearest-to-center truncation).
    #[arg(long, global = true)]
    teams: Option<usize>,
    /// Power price weight override.
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Coverage price override.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Price mode override.
    #[arg(long, global = true, value_enum)]
    xi_mode: Option<XiMode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the scenario and write it to the output directory.
    Build,
    /// Compute the interference price and write calibration.json.
    Calibrate,
    /// Evaluate one strategy and write its report.
    Run {
        #[arg(long, value_enum, default_value = "bps")]
        strategy: StrategyArg,
    },
    /// Evaluate the solver and all four baselines; write a joined CSV.
    Compare,
    /// Re-run the solver across a list of k or delta values.
    Sweep {
        #[arg(long, value_enum)]
        parameter: SweepParameter,
        /// Comma-separated values, e.g. `0,0.25,0.5,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Cross-check the solver against exhaustive search on random toys.
    Verify,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CommandError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.directory = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.scenario.seed = seed;
    }
    if let Some(teams) = cli.teams {
        cfg.scenario.team_count = Some(teams);
    }
    if let Some(k) = cli.k {
        cfg.game.k = k;
    }
    if let Some(delta) = cli.delta {
        cfg.game.delta = delta;
    }
    if let Some(mode) = cli.xi_mode {
        cfg.game.xi_mode = mode;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CommandError> {
    let ctx = Context::new(load_config(cli)?);
    match &cli.command {
        Command::Build => commands::cmd_build(&ctx),
        Command::Calibrate => commands::cmd_calibrate(&ctx),
        Command::Run { strategy } => commands::cmd_run(&ctx, *strategy),
        Command::Compare => commands::cmd_compare(&ctx),
        Command::Sweep { parameter, values } => commands::cmd_sweep(&ctx, *parameter, values),
        Command::Verify => commands::cmd_verify(&ctx),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

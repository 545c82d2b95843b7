//! Implementations behind the CLI subcommands. Each returns a typed
//! error so `main` can map failure classes to distinct exit codes.

use std::path::PathBuf;

use capow_core::baselines::{evaluate_baseline, BaselineConfig, BaselineKind};
use capow_core::game::{GameParams, XiPrice};
use capow_core::metrics::{
    global_unserved, global_utility_watts, per_user_throughput, strategy_histogram, RateTable,
    RunReport,
};
use capow_core::oracle::{self, Objective};
use capow_core::scenario::{Scenario, ScenarioError};
use capow_core::solver::{run_multicarrier_capped, GameTrace, SolverError};
use capow_core::toy::{random_toy, ToySpec};
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::io::{self, IoError, SweepRow};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("solver did not converge: {0}")]
    Solver(#[from] SolverError),
    #[error("oracle: {0}")]
    Oracle(#[from] capow_core::oracle::OracleError),
}

impl CommandError {
    /// 1 = configuration problem, 2 = non-convergence, 3 = oracle guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Solver(_) => 2,
            CommandError::Oracle(_) => 3,
            _ => 1,
        }
    }
}

pub struct Context {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn new(config: ExperimentConfig) -> Self {
        let out_dir = PathBuf::from(&config.output.directory);
        Context { config, out_dir }
    }

    fn build(&self) -> Result<Scenario, CommandError> {
        Ok(Scenario::generate(&self.config.scenario_spec())?)
    }

    fn rate_table(&self) -> Result<RateTable, CommandError> {
        Ok(io::load_rate_table(self.config.output.rate_table.as_deref())?)
    }
}

pub fn cmd_build(ctx: &Context) -> Result<(), CommandError> {
    let scenario = ctx.build()?;
    io::write_scenario(&ctx.out_dir, &scenario)?;
    let reread = io::read_scenario(&ctx.out_dir)?;
    if reread != scenario {
        return Err(CommandError::Io(IoError::Format {
            path: ctx.out_dir.display().to_string(),
            message: "scenario did not survive a write-read round trip".into(),
        }));
    }
    let ue_total: u64 = scenario.tiles.iter().map(|t| t.ue_count as u64).sum();
    println!(
        "scenario: {} teams, {} stations, {} tiles, {} carriers, {} UEs",
        scenario.teams.len(),
        scenario.stations.len(),
        scenario.tiles.len(),
        scenario.carrier_count(),
        ue_total,
    );
    println!("written to {}", ctx.out_dir.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct CalibrationFile {
    k: f64,
    xi: XiPrice,
    mean_interference_w: f64,
}

pub fn cmd_calibrate(ctx: &Context) -> Result<(), CommandError> {
    let scenario = ctx.build()?;
    let params = ctx.config.calibrated_params(&scenario);
    let mean = match &params.xi {
        XiPrice::Global(xi) if *xi > 0.0 => ctx.config.game.k * params.alpha / xi,
        _ => f64::NAN,
    };
    let file = CalibrationFile { k: ctx.config.game.k, xi: params.xi.clone(), mean_interference_w: mean };
    let path = ctx.out_dir.join("calibration.json");
    io::write_json(&path, &file)?;
    match &file.xi {
        XiPrice::Global(xi) => println!("xi = {xi:.6e} (global, k = {})", file.k),
        XiPrice::PerTeam(v) => println!("xi = per-team, {} values, k = {}", v.len(), file.k),
    }
    println!("written to {}", path.display());
    Ok(())
}

fn bps_report(
    scenario: &Scenario,
    params: &GameParams,
    table: &RateTable,
    round_cap: usize,
) -> Result<(RunReport, capow_core::StrategyProfile, GameTrace), CommandError> {
    let (profile, trace) = run_multicarrier_capped(scenario, params, round_cap)?;
    let power = profile.realize(scenario, &params.levels);
    let all: Vec<usize> = (0..scenario.carrier_count()).collect();
    let report = RunReport {
        strategy: "bps".into(),
        global_utility: global_utility_watts(scenario, params, &power),
        total_power_w: power.total_watts(),
        unserved_fraction: global_unserved(scenario, params, &power, &all),
        per_user_throughput: per_user_throughput(scenario, params, &power, table),
        avg_team_iterations: trace.iterations_per_team(),
        strategy_histogram: strategy_histogram(scenario, params, &profile),
    };
    Ok((report, profile, trace))
}

fn baseline_config(ctx: &Context, kind: BaselineKind) -> BaselineConfig {
    let b = &ctx.config.baselines;
    match kind {
        BaselineKind::MaxPower | BaselineKind::MinPower => BaselineConfig {
            kind,
            cre_bias_db: 0.0,
            abs_ratio: 0.0,
            abs_macro_power_reduction_db: None,
        },
        BaselineKind::Eicic => BaselineConfig {
            kind,
            cre_bias_db: b.eicic.cre_bias_db,
            abs_ratio: b.eicic.abs_ratio,
            abs_macro_power_reduction_db: b.eicic.abs_macro_power_reduction_db,
        },
        BaselineKind::LpAbs => BaselineConfig {
            kind,
            cre_bias_db: b.lp_abs.cre_bias_db,
            abs_ratio: b.lp_abs.abs_ratio,
            abs_macro_power_reduction_db: b.lp_abs.abs_macro_power_reduction_db,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyArg {
    Bps,
    Max,
    Min,
    Eicic,
    LpAbs,
}

pub fn cmd_run(ctx: &Context, strategy: StrategyArg) -> Result<(), CommandError> {
    let scenario = ctx.build()?;
    let params = ctx.config.calibrated_params(&scenario);
    let table = ctx.rate_table()?;
    let (report, json_path) = match strategy {
        StrategyArg::Bps => {
            let (report, profile, trace) =
                bps_report(&scenario, &params, &table, ctx.config.solver.round_cap)?;
            io::write_trace(&ctx.out_dir, &trace)?;
            let (json_path, _) = io::write_report(&ctx.out_dir, &report, Some(&profile))?;
            (report, json_path)
        }
        other => {
            let kind = match other {
                StrategyArg::Max => BaselineKind::MaxPower,
                StrategyArg::Min => BaselineKind::MinPower,
                StrategyArg::Eicic => BaselineKind::Eicic,
                StrategyArg::LpAbs => BaselineKind::LpAbs,
                StrategyArg::Bps => unreachable!(),
            };
            let report =
                evaluate_baseline(&scenario, &params, &baseline_config(ctx, kind), &table)?;
            let (json_path, _) = io::write_report(&ctx.out_dir, &report, None)?;
            (report, json_path)
        }
    };
    println!(
        "{}: utility {:.4}, power {:.2} W, unserved {:.4}",
        report.strategy, report.global_utility, report.total_power_w, report.unserved_fraction
    );
    println!("written to {}", json_path.display());
    Ok(())
}

pub fn cmd_compare(ctx: &Context) -> Result<(), CommandError> {
    let scenario = ctx.build()?;
    let params = ctx.config.calibrated_params(&scenario);
    let table = ctx.rate_table()?;
    let mut reports = Vec::new();
    let (report, profile, trace) =
        bps_report(&scenario, &params, &table, ctx.config.solver.round_cap)?;
    io::write_trace(&ctx.out_dir, &trace)?;
    io::write_report(&ctx.out_dir, &report, Some(&profile))?;
    reports.push(report);
    for kind in
        [BaselineKind::MaxPower, BaselineKind::MinPower, BaselineKind::Eicic, BaselineKind::LpAbs]
    {
        let report = evaluate_baseline(&scenario, &params, &baseline_config(ctx, kind), &table)?;
        io::write_report(&ctx.out_dir, &report, None)?;
        reports.push(report);
    }
    let path = io::write_comparison(&ctx.out_dir, &reports)?;
    for r in &reports {
        println!(
            "{:>6}: utility {:.4}, power {:.2} W, unserved {:.4}",
            r.strategy, r.global_utility, r.total_power_w, r.unserved_fraction
        );
    }
    println!("written to {}", path.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParameter {
    K,
    Delta,
}

pub fn cmd_sweep(
    ctx: &Context,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<(), CommandError> {
    if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(
            ConfigError::Invalid("sweep values must be finite and non-negative".into()).into()
        );
    }
    let scenario = ctx.build()?;
    let table = ctx.rate_table()?;
    let mut rows = Vec::new();
    for &value in values {
        let mut cfg = ctx.config.clone();
        match parameter {
            SweepParameter::K => cfg.game.k = value,
            SweepParameter::Delta => cfg.game.delta = value,
        }
        let params = cfg.calibrated_params(&scenario);
        let (report, _, _) = bps_report(&scenario, &params, &table, cfg.solver.round_cap)?;
        println!(
            "{} = {value}: utility {:.4}, power {:.2} W, unserved {:.4}",
            parameter_name(parameter),
            report.global_utility,
            report.total_power_w,
            report.unserved_fraction
        );
        rows.push(SweepRow {
            value,
            global_utility: report.global_utility,
            unserved_fraction: report.unserved_fraction,
            total_power_w: report.total_power_w,
        });
    }
    let path = io::write_sweep(&ctx.out_dir, parameter_name(parameter), &rows)?;
    println!("written to {}", path.display());
    Ok(())
}

fn parameter_name(parameter: SweepParameter) -> &'static str {
    match parameter {
        SweepParameter::K => "k",
        SweepParameter::Delta => "delta",
    }
}

#[derive(Debug, Serialize)]
struct VerifyInstance {
    seed: u64,
    bps_payoff: f64,
    bps_utility: f64,
    bps_power_w: f64,
    optimum_payoff: f64,
    optimum_utility: f64,
    optimum_power_w: f64,
    best_reply_matches: usize,
    best_reply_total: usize,
    is_ne: bool,
}

#[derive(Debug, Serialize)]
struct VerifyFile {
    instances: Vec<VerifyInstance>,
    mean_bps_payoff: f64,
    mean_optimum_payoff: f64,
    mean_bps_utility: f64,
    mean_optimum_utility: f64,
    best_reply_equality: f64,
    all_ne: bool,
}

/// Cross-check BPS against exhaustive search on random 2-team toys.
pub fn cmd_verify(ctx: &Context) -> Result<(), CommandError> {
    let v = &ctx.config.verify;
    if v.toys == 0 {
        return Err(ConfigError::Invalid("verify.toys must be positive".into()).into());
    }
    let spec = ToySpec {
        teams: 2,
        locations: 2,
        carriers: v.carriers,
        tiles_per_team: v.tiles_per_team,
        ..ToySpec::default()
    };
    let levels = capow_core::game::PowerLevelSet::new(v.power_levels.clone())
        .map_err(|e| ConfigError::Invalid(format!("verify.power_levels: {e}")))?;
    let mut instances = Vec::new();
    for i in 0..v.toys {
        let seed = v.seed.wrapping_add(i as u64);
        let scenario = random_toy(seed, &spec);
        let mut params = ctx.config.calibrated_params(&scenario);
        params.levels = levels.clone();

        let (profile, _) = run_multicarrier_capped(&scenario, &params, ctx.config.solver.round_cap)?;
        let optimum = oracle::exhaustive_joint_optimum(&scenario, &params, Objective::PayoffSum)?;
        let verdict = oracle::verify_ne(&scenario, &params, &profile)?;

        let mut matches = 0;
        let mut total = 0;
        for t in 0..scenario.teams.len() {
            for c in 0..scenario.carrier_count() {
                let settled: Vec<usize> = (0..c).collect();
                let fast = capow_core::solver::best_reply_single_carrier(
                    &scenario, &params, &profile, t, c, &settled,
                )
                .0;
                let slow =
                    oracle::exhaustive_best_reply(&scenario, &params, &profile, t, c, &settled)?;
                total += 1;
                if fast == slow {
                    matches += 1;
                }
            }
        }

        let payoff_sum = |p: &capow_core::StrategyProfile| -> f64 {
            (0..scenario.teams.len()).map(|t| oracle::full_payoff(&scenario, &params, p, t)).sum()
        };
        let utility_sum = |p: &capow_core::StrategyProfile| -> f64 {
            (0..scenario.teams.len())
                .map(|t| capow_core::game::team_utility(&scenario, &params, p, t))
                .sum()
        };
        instances.push(VerifyInstance {
            seed,
            bps_payoff: payoff_sum(&profile),
            bps_utility: utility_sum(&profile),
            bps_power_w: profile.realize(&scenario, &params.levels).total_watts(),
            optimum_payoff: payoff_sum(&optimum),
            optimum_utility: utility_sum(&optimum),
            optimum_power_w: optimum.realize(&scenario, &params.levels).total_watts(),
            best_reply_matches: matches,
            best_reply_total: total,
            is_ne: verdict.is_ne,
        });
    }
    let n = instances.len() as f64;
    let file = VerifyFile {
        mean_bps_payoff: instances.iter().map(|i| i.bps_payoff).sum::<f64>() / n,
        mean_optimum_payoff: instances.iter().map(|i| i.optimum_payoff).sum::<f64>() / n,
        mean_bps_utility: instances.iter().map(|i| i.bps_utility).sum::<f64>() / n,
        mean_optimum_utility: instances.iter().map(|i| i.optimum_utility).sum::<f64>() / n,
        best_reply_equality: instances.iter().map(|i| i.best_reply_matches).sum::<usize>() as f64
            / instances.iter().map(|i| i.best_reply_total).sum::<usize>() as f64,
        all_ne: instances.iter().all(|i| i.is_ne),
        instances,
    };
    let path = ctx.out_dir.join("verify.json");
    io::write_json(&path, &file)?;
    println!(
        "{} toys: mean payoff {:.4} (optimum {:.4}), mean utility {:.4} (optimum {:.4})",
        v.toys,
        file.mean_bps_payoff,
        file.mean_optimum_payoff,
        file.mean_bps_utility,
        file.mean_optimum_utility
    );
    println!(
        "best-reply equality {:.1}%, all fixed points NE: {}",
        100.0 * file.best_reply_equality,
        file.all_ne
    );
    println!("written to {}", path.display());
    Ok(())
}

//! File formats: scenario export/import, the SINR-to-efficiency table,
//! run reports, solver traces and sweep tables.
//!
//! A scenario is stored as a JSON description plus a little-endian f64
//! sidecar holding the attenuation tensor, which is far too large for
//! readable JSON. The rate table is plain text with one
//! `sinr_db efficiency` pair per line. Everything else is JSON or CSV.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use capow_core::game::StrategyProfile;
use capow_core::metrics::{RateTable, RunReport};
use capow_core::scenario::{AttenuationTensor, BaseStation, CarrierSpec, Scenario, Team, Tile};
use capow_core::solver::GameTrace;
use serde::{Deserialize, Serialize};

/// Shipped default SINR-to-efficiency mapping.
pub const DEFAULT_RATE_TABLE: &str = include_str!("../data/rate_table.txt");

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File { path: path.display().to_string(), source }
}

fn format_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Format { path: path.display().to_string(), message: message.into() }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    carriers: Vec<CarrierSpec>,
    stations: Vec<BaseStation>,
    teams: Vec<Team>,
    tiles: Vec<Tile>,
    tensor_stations: usize,
    tensor_tiles: usize,
    tensor_carriers: usize,
    tensor_file: String,
}

/// Write `scenario.json` and `attenuation.bin` under `dir`.
pub fn write_scenario(dir: &Path, scenario: &Scenario) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    let bin_name = "attenuation.bin";
    let file = ScenarioFile {
        carriers: scenario.carriers.clone(),
        stations: scenario.stations.clone(),
        teams: scenario.teams.clone(),
        tiles: scenario.tiles.clone(),
        tensor_stations: scenario.attenuation.stations,
        tensor_tiles: scenario.attenuation.tiles,
        tensor_carriers: scenario.attenuation.carriers,
        tensor_file: bin_name.into(),
    };
    let json_path = dir.join("scenario.json");
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| format_err(&json_path, e.to_string()))?;
    fs::write(&json_path, json).map_err(|e| file_err(&json_path, e))?;

    let bin_path = dir.join(bin_name);
    let mut bytes = Vec::with_capacity(scenario.attenuation.values.len() * 8);
    for v in &scenario.attenuation.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin_path, bytes).map_err(|e| file_err(&bin_path, e))?;
    Ok(())
}

/// Load a scenario previously written by [`write_scenario`].
pub fn read_scenario(dir: &Path) -> Result<Scenario, IoError> {
    let json_path = dir.join("scenario.json");
    let text = fs::read_to_string(&json_path).map_err(|e| file_err(&json_path, e))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| format_err(&json_path, e.to_string()))?;

    let bin_path = dir.join(&file.tensor_file);
    let mut bytes = Vec::new();
    fs::File::open(&bin_path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| file_err(&bin_path, e))?;
    let expected = file.tensor_stations * file.tensor_tiles * file.tensor_carriers;
    if bytes.len() != expected * 8 {
        return Err(format_err(
            &bin_path,
            format!("expected {} f64 values, found {} bytes", expected, bytes.len()),
        ));
    }
    let values: Vec<f64> =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let tensor = AttenuationTensor {
        stations: file.tensor_stations,
        tiles: file.tensor_tiles,
        carriers: file.tensor_carriers,
        values,
    };
    Scenario::assemble(file.carriers, file.stations, file.teams, file.tiles, tensor)
        .map_err(|e| format_err(&json_path, e.to_string()))
}

/// Parse a `sinr_db efficiency` table; `#` starts a comment.
pub fn parse_rate_table(text: &str, origin: &Path) -> Result<RateTable, IoError> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |s: Option<&str>| -> Option<f64> { s.and_then(|v| v.parse().ok()) };
        match (parse(parts.next()), parse(parts.next()), parts.next()) {
            (Some(sinr), Some(eff), None) => rows.push((sinr, eff)),
            _ => {
                return Err(format_err(
                    origin,
                    format!("line {}: expected `sinr_db efficiency`", lineno + 1),
                ))
            }
        }
    }
    RateTable::new(rows).map_err(|e| format_err(origin, e.to_string()))
}

/// The table from `path`, or the shipped default when `None`.
pub fn load_rate_table(path: Option<&str>) -> Result<RateTable, IoError> {
    match path {
        Some(p) => {
            let path = Path::new(p);
            let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
            parse_rate_table(&text, path)
        }
        None => parse_rate_table(DEFAULT_RATE_TABLE, Path::new("<built-in rate table>")),
    }
}

/// JSON view of a [`RunReport`] minus the bulky per-user list, which goes
/// to its own CSV.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub strategy: String,
    pub global_utility: f64,
    pub total_power_w: f64,
    pub unserved_fraction: f64,
    pub ue_count: usize,
    pub mean_throughput_bps: f64,
    pub avg_team_iterations: f64,
    /// `counts[kind][carrier][level]`, kind 0 = macro, 1 = micro.
    pub strategy_histogram: Vec<Vec<Vec<u64>>>,
    /// Chosen power level indices, `profile[team][location][carrier]`;
    /// only present for the game solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Vec<Vec<usize>>>>,
}

pub fn profile_matrix(profile: &StrategyProfile) -> Vec<Vec<Vec<usize>>> {
    profile
        .teams
        .iter()
        .map(|s| {
            (0..s.locations())
                .map(|lp| (0..s.carriers()).map(|c| s.get(lp, c)).collect())
                .collect()
        })
        .collect()
}

/// Write `report_<strategy>.json` and `throughput_<strategy>.csv`;
/// returns both paths.
pub fn write_report(
    dir: &Path,
    report: &RunReport,
    profile: Option<&StrategyProfile>,
) -> Result<(PathBuf, PathBuf), IoError> {
    fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    let n = report.per_user_throughput.len();
    let mean = if n == 0 {
        0.0
    } else {
        report.per_user_throughput.iter().sum::<f64>() / n as f64
    };
    let file = ReportFile {
        strategy: report.strategy.clone(),
        global_utility: report.global_utility,
        total_power_w: report.total_power_w,
        unserved_fraction: report.unserved_fraction,
        ue_count: n,
        mean_throughput_bps: mean,
        avg_team_iterations: report.avg_team_iterations,
        strategy_histogram: report.strategy_histogram.clone(),
        profile: profile.map(profile_matrix),
    };
    let json_path = dir.join(format!("report_{}.json", report.strategy));
    let json =
        serde_json::to_string_pretty(&file).map_err(|e| format_err(&json_path, e.to_string()))?;
    fs::write(&json_path, json).map_err(|e| file_err(&json_path, e))?;

    let csv_path = dir.join(format!("throughput_{}.csv", report.strategy));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| format_err(&csv_path, e.to_string()))?;
    w.write_record(["ue", "throughput_bps"]).map_err(|e| format_err(&csv_path, e.to_string()))?;
    for (i, rate) in report.per_user_throughput.iter().enumerate() {
        w.write_record([i.to_string(), format!("{rate:.6}")])
            .map_err(|e| format_err(&csv_path, e.to_string()))?;
    }
    w.flush().map_err(|e| file_err(&csv_path, e.into()))?;
    Ok((json_path, csv_path))
}

/// One CSV line per best-reply event.
pub fn write_trace(dir: &Path, trace: &GameTrace) -> Result<PathBuf, IoError> {
    fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    let path = dir.join("trace_bps.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| format_err(&path, e.to_string()))?;
    w.write_record(["iteration", "round", "team", "carrier", "column", "changed", "payoff", "utility", "cost", "column_watts"])
        .map_err(|e| format_err(&path, e.to_string()))?;
    for ev in &trace.events {
        let column = ev
            .column
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([
            ev.iteration.to_string(),
            ev.round.to_string(),
            ev.team.to_string(),
            ev.carrier.to_string(),
            column,
            ev.changed.to_string(),
            format!("{:.9}", ev.payoff),
            format!("{:.9}", ev.utility),
            format!("{:.9}", ev.cost),
            format!("{:.9}", ev.column_watts),
        ])
        .map_err(|e| format_err(&path, e.to_string()))?;
    }
    w.flush().map_err(|e| file_err(&path, e.into()))?;
    Ok(path)
}

/// One sweep result row.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub global_utility: f64,
    pub unserved_fraction: f64,
    pub total_power_w: f64,
}

pub fn write_sweep(dir: &Path, parameter: &str, rows: &[SweepRow]) -> Result<PathBuf, IoError> {
    fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    let path = dir.join(format!("sweep_{parameter}.csv"));
    let mut w = csv::Writer::from_path(&path).map_err(|e| format_err(&path, e.to_string()))?;
    w.write_record([parameter, "global_utility", "unserved_fraction", "total_power_w"])
        .map_err(|e| format_err(&path, e.to_string()))?;
    for row in rows {
        w.write_record([
            format!("{}", row.value),
            format!("{:.9}", row.global_utility),
            format!("{:.9}", row.unserved_fraction),
            format!("{:.9}", row.total_power_w),
        ])
        .map_err(|e| format_err(&path, e.to_string()))?;
    }
    w.flush().map_err(|e| file_err(&path, e.into()))?;
    Ok(path)
}

/// Joined comparison table: one row per strategy.
pub fn write_comparison(dir: &Path, reports: &[RunReport]) -> Result<PathBuf, IoError> {
    fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    let path = dir.join("comparison.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| format_err(&path, e.to_string()))?;
    w.write_record(["strategy", "global_utility", "total_power_w", "unserved_fraction", "mean_throughput_bps", "avg_team_iterations"])
        .map_err(|e| format_err(&path, e.to_string()))?;
    for r in reports {
        let n = r.per_user_throughput.len();
        let mean =
            if n == 0 { 0.0 } else { r.per_user_throughput.iter().sum::<f64>() / n as f64 };
        w.write_record([
            r.strategy.clone(),
            format!("{:.9}", r.global_utility),
            format!("{:.9}", r.total_power_w),
            format!("{:.9}", r.unserved_fraction),
            format!("{:.3}", mean),
            format!("{:.3}", r.avg_team_iterations),
        ])
        .map_err(|e| format_err(&path, e.to_string()))?;
    }
    w.flush().map_err(|e| file_err(&path, e.into()))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| file_err(parent, e))?;
    }
    let json = serde_json::to_string_pretty(value).map_err(|e| format_err(path, e.to_string()))?;
    let mut f = fs::File::create(path).map_err(|e| file_err(path, e))?;
    f.write_all(json.as_bytes()).map_err(|e| file_err(path, e))?;
    f.write_all(b"\n").map_err(|e| file_err(path, e))?;
    Ok(())
}

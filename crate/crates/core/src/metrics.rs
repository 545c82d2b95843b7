//! Evaluation quantities: the SINR-to-throughput lookup, per-user
//! throughput with carrier aggregation, global utility, total power and
//! CDF helpers.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::game::{
    interference_watts, sinr_with_interference, team_unserved_counts, GameParams, PowerProfile,
    StrategyProfile,
};
use crate::scenario::{BsKind, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub enum RateTableError {
    Invalid(String),
}

impl fmt::Display for RateTableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateTableError::Invalid(msg) => write!(f, "invalid rate table: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RateTableError {}

/// Step lookup from SINR (dB) to spectral efficiency (bit/s/Hz): the
/// highest row whose threshold does not exceed the input; below the
/// first row the efficiency is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    rows: Vec<(f64, f64)>,
}

impl RateTable {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self, RateTableError> {
        if rows.is_empty() {
            return Err(RateTableError::Invalid("empty".into()));
        }
        if rows.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(RateTableError::Invalid("thresholds must strictly increase".into()));
        }
        if rows.windows(2).any(|w| w[0].1 > w[1].1) || rows.iter().any(|r| r.1 < 0.0) {
            return Err(RateTableError::Invalid("efficiencies must be non-decreasing and nonnegative".into()));
        }
        Ok(RateTable { rows })
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    /// Spectral efficiency for an SINR in dB.
    pub fn efficiency(&self, sinr_db: f64) -> f64 {
        let mut eff = 0.0;
        for &(thr, e) in &self.rows {
            if sinr_db >= thr {
                eff = e;
            } else {
                break;
            }
        }
        eff
    }
}

/// Throughput in bit/s for one SINR sample over `bandwidth_hz`.
pub fn map_sinr_to_throughput(sinr_db: f64, bandwidth_hz: f64, table: &RateTable) -> f64 {
    bandwidth_hz * table.efficiency(sinr_db)
}

/// Linear SINR of every (tile, carrier) pair, row-major over tiles.
pub fn sinr_grid(scenario: &Scenario, params: &GameParams, power: &PowerProfile) -> Vec<f64> {
    let c_count = scenario.carrier_count();
    let mut grid = vec![0.0; scenario.tiles.len() * c_count];
    for team in &scenario.teams {
        let inter = interference_watts(scenario, power, team.id);
        for (zp, &z) in inter.tiles.iter().enumerate() {
            for c in 0..c_count {
                grid[z * c_count + c] = sinr_with_interference(
                    scenario, params, power, team.id, z, c, inter.get(zp, c),
                );
            }
        }
    }
    grid
}

/// Per-user downlink throughput under equal-bandwidth sharing: on each
/// (serving station, carrier) the carrier bandwidth is split evenly among
/// the UEs whose tile clears `gamma_min` there; a UE aggregates its share
/// over all carriers it clears. Ordered by tile id, `ue_count` entries
/// per tile.
pub fn per_user_throughput(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    table: &RateTable,
) -> Vec<f64> {
    let c_count = scenario.carrier_count();
    let grid = sinr_grid(scenario, params, power);
    // UEs meeting the threshold per (station, carrier).
    let mut sharers = vec![0u64; scenario.stations.len() * c_count];
    for tile in &scenario.tiles {
        for c in 0..c_count {
            if grid[tile.id * c_count + c] >= params.gamma_min {
                sharers[tile.serving * c_count + c] += tile.ue_count as u64;
            }
        }
    }
    let mut out = Vec::with_capacity(scenario.total_ues as usize);
    for tile in &scenario.tiles {
        let mut rate = 0.0;
        for c in 0..c_count {
            let gamma = grid[tile.id * c_count + c];
            if gamma < params.gamma_min {
                continue;
            }
            let n = sharers[tile.serving * c_count + c];
            debug_assert!(n > 0 || tile.ue_count == 0);
            if n > 0 {
                let sinr_db = 10.0 * libm::log10(gamma);
                rate += scenario.carriers[c].bandwidth_hz / n as f64 * table.efficiency(sinr_db);
            }
        }
        for _ in 0..tile.ue_count {
            out.push(rate);
        }
    }
    out
}

/// Sum of all team utilities.
pub fn global_utility(scenario: &Scenario, params: &GameParams, profile: &StrategyProfile) -> f64 {
    let power = profile.realize(scenario, &params.levels);
    global_utility_watts(scenario, params, &power)
}

pub fn global_utility_watts(scenario: &Scenario, params: &GameParams, power: &PowerProfile) -> f64 {
    (0..scenario.teams.len())
        .map(|t| crate::game::team_utility_watts(scenario, params, power, t))
        .sum()
}

/// Sum of the selected transmit powers over all stations and carriers.
pub fn total_power(scenario: &Scenario, params: &GameParams, profile: &StrategyProfile) -> f64 {
    profile.realize(scenario, &params.levels).total_watts()
}

/// Network-wide unserved fraction: UEs below `gamma_min` on every carrier
/// in `settled`, over all UEs.
pub fn global_unserved(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    settled: &[usize],
) -> f64 {
    if scenario.total_ues == 0 {
        return 0.0;
    }
    let unserved: u64 = (0..scenario.teams.len())
        .map(|t| team_unserved_counts(scenario, params, power, t, settled))
        .sum();
    unserved as f64 / scenario.total_ues as f64
}

/// Counts of chosen level indices split by station kind, per carrier:
/// `counts[kind][carrier][level]` with kind 0 = macro, 1 = micro.
pub fn strategy_histogram(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
) -> Vec<Vec<Vec<u64>>> {
    let c_count = scenario.carrier_count();
    let n_levels = params.levels.len();
    let mut counts = vec![vec![vec![0u64; n_levels]; c_count]; 2];
    for (t, team) in scenario.teams.iter().enumerate() {
        for (lp, &sid) in team.locations.iter().enumerate() {
            let kind = match scenario.stations[sid].kind {
                BsKind::Macro => 0,
                BsKind::Micro => 1,
            };
            for c in 0..c_count {
                counts[kind][c][profile.teams[t].get(lp, c)] += 1;
            }
        }
    }
    counts
}

/// Summary of one strategy's evaluation on a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub strategy: String,
    pub global_utility: f64,
    pub total_power_w: f64,
    pub unserved_fraction: f64,
    /// One entry per UE, tile-id order.
    pub per_user_throughput: Vec<f64>,
    /// Mean BPS executions per team; zero for fixed strategies.
    pub avg_team_iterations: f64,
    /// `counts[kind][carrier][level]`, kind 0 = macro, 1 = micro.
    pub strategy_histogram: Vec<Vec<Vec<u64>>>,
}

/// Empirical CDF value of `x` over `samples` (any order).
pub fn empirical_cdf(samples: &[f64], x: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|&&s| s <= x).count() as f64 / samples.len() as f64
}

/// Largest vertical gap between the empirical CDFs of two samples (the
/// two-sample Kolmogorov-Smirnov statistic).
pub fn max_cdf_gap(a: &[f64], b: &[f64]) -> f64 {
    let mut pts: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut a_sorted = a.to_vec();
    let mut b_sorted = b.to_vec();
    a_sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b_sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut gap: f64 = 0.0;
    for &x in &pts {
        let fa = a_sorted.partition_point(|&v| v <= x) as f64 / a_sorted.len().max(1) as f64;
        let fb = b_sorted.partition_point(|&v| v <= x) as f64 / b_sorted.len().max(1) as f64;
        gap = gap.max((fa - fb).abs());
    }
    gap
}

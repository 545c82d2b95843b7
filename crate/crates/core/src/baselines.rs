//! Comparison strategies: fixed max/min power and the two ABS-muting
//! schemes (full muting with cell range expansion, and reduced-power
//! subframes).
//!
//! The muting schemes keep every station at maximum power outside the
//! protected subframes; inside them macros either mute entirely or back
//! off by a fixed number of dB. Subframe patterns are modeled as a time
//! fraction, and user association for these schemes follows the
//! strongest received pilot plus a bias toward micros.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::game::{GameParams, PowerProfile, StrategyProfile};
use crate::metrics::{
    global_unserved, global_utility_watts, per_user_throughput, strategy_histogram, RateTable,
    RunReport,
};
use crate::scenario::{BsKind, Scenario, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BaselineKind {
    MaxPower,
    MinPower,
    Eicic,
    LpAbs,
}

impl BaselineKind {
    pub fn label(&self) -> &'static str {
        match self {
            BaselineKind::MaxPower => "max",
            BaselineKind::MinPower => "min",
            BaselineKind::Eicic => "eicic",
            BaselineKind::LpAbs => "lp_abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    /// Association bias toward micros, dB.
    pub cre_bias_db: f64,
    /// Fraction of subframes that are protected.
    pub abs_ratio: f64,
    /// Macro power reduction during protected subframes, dB; `None`
    /// mutes entirely.
    pub abs_macro_power_reduction_db: Option<f64>,
}

impl BaselineConfig {
    /// Full muting, 8 dB range expansion, 25% protected subframes.
    pub fn eicic_default() -> Self {
        BaselineConfig {
            kind: BaselineKind::Eicic,
            cre_bias_db: 8.0,
            abs_ratio: 0.25,
            abs_macro_power_reduction_db: None,
        }
    }

    /// 6 dB macro backoff, 6 dB bias, 50% protected subframes.
    pub fn lp_abs_default() -> Self {
        BaselineConfig {
            kind: BaselineKind::LpAbs,
            cre_bias_db: 6.0,
            abs_ratio: 0.5,
            abs_macro_power_reduction_db: Some(6.0),
        }
    }
}

/// All entries at the top level (max) or the lowest nonzero level (min).
pub fn fixed_profile(scenario: &Scenario, params: &GameParams, kind: BaselineKind) -> StrategyProfile {
    let index = match kind {
        BaselineKind::MinPower => params.levels.min_active_index(),
        _ => params.levels.max_index(),
    };
    StrategyProfile::uniform(scenario, index)
}

/// Tile association by strongest received pilot plus `bias_db` for
/// micros. Pilots transmit at station maximum power on `pilot_carrier`.
pub fn biased_association(scenario: &Scenario, bias_db: f64, pilot_carrier: usize) -> Vec<usize> {
    scenario
        .tiles
        .iter()
        .map(|tile| {
            let mut best = (f64::NEG_INFINITY, 0usize);
            for s in &scenario.stations {
                let rx = s.max_power_w * scenario.attenuation.get(s.id, tile.id, pilot_carrier);
                let mut rx_db = 10.0 * libm::log10(rx);
                if s.kind == BsKind::Micro {
                    rx_db += bias_db;
                }
                if rx_db > best.0 {
                    best = (rx_db, s.id);
                }
            }
            best.1
        })
        .collect()
}

/// The carrier used as the association pilot: the mid-band one.
pub fn pilot_carrier(scenario: &Scenario) -> usize {
    (scenario.carrier_count() - 1) / 2
}

/// Watt-level profiles of the two subframe phases: (outside, inside) the
/// protected subframes.
pub fn phase_profiles(scenario: &Scenario, cfg: &BaselineConfig) -> (PowerProfile, PowerProfile) {
    let c = scenario.carrier_count();
    let mut normal = PowerProfile::zero(scenario);
    let mut protected = PowerProfile::zero(scenario);
    let reduction = cfg
        .abs_macro_power_reduction_db
        .map(|db| libm::pow(10.0, -db / 10.0))
        .unwrap_or(0.0);
    for (t, team) in scenario.teams.iter().enumerate() {
        for (lp, &sid) in team.locations.iter().enumerate() {
            let max = scenario.stations[sid].max_power_w;
            let abs_watts = match scenario.stations[sid].kind {
                BsKind::Macro => max * reduction,
                BsKind::Micro => max,
            };
            for cc in 0..c {
                normal.set_watts(t, lp, cc, max);
                protected.set_watts(t, lp, cc, abs_watts);
            }
        }
    }
    (normal, protected)
}

/// Time-shared per-user throughput:
/// `abs_ratio * rate(protected) + (1 - abs_ratio) * rate(normal)`.
/// Under full muting, macro-served tiles earn nothing in protected
/// subframes.
pub fn abs_throughput(
    scenario: &Scenario,
    params: &GameParams,
    cfg: &BaselineConfig,
    table: &RateTable,
) -> Vec<f64> {
    let (normal, protected) = phase_profiles(scenario, cfg);
    let out_rate = per_user_throughput(scenario, params, &normal, table);
    let in_rate = per_user_throughput(scenario, params, &protected, table);
    out_rate
        .iter()
        .zip(&in_rate)
        .map(|(o, i)| (1.0 - cfg.abs_ratio) * o + cfg.abs_ratio * i)
        .collect()
}

/// Evaluate one baseline into the common report schema. The muting
/// schemes re-associate tiles by biased pilot and report time-weighted
/// utility and power across the two phases; a UE counts as unserved only
/// if it misses the threshold on every carrier in both phases.
pub fn evaluate_baseline(
    scenario: &Scenario,
    params: &GameParams,
    cfg: &BaselineConfig,
    table: &RateTable,
) -> Result<RunReport, ScenarioError> {
    let all: Vec<usize> = (0..scenario.carrier_count()).collect();
    match cfg.kind {
        BaselineKind::MaxPower | BaselineKind::MinPower => {
            let profile = fixed_profile(scenario, params, cfg.kind);
            let power = profile.realize(scenario, &params.levels);
            Ok(RunReport {
                strategy: cfg.kind.label().to_string(),
                global_utility: global_utility_watts(scenario, params, &power),
                total_power_w: power.total_watts(),
                unserved_fraction: global_unserved(scenario, params, &power, &all),
                per_user_throughput: per_user_throughput(scenario, params, &power, table),
                avg_team_iterations: 0.0,
                strategy_histogram: strategy_histogram(scenario, params, &profile),
            })
        }
        BaselineKind::Eicic | BaselineKind::LpAbs => {
            let assoc = biased_association(scenario, cfg.cre_bias_db, pilot_carrier(scenario));
            let sc = scenario.with_association(&assoc)?;
            let (normal, protected) = phase_profiles(&sc, cfg);
            let utility = (1.0 - cfg.abs_ratio) * global_utility_watts(&sc, params, &normal)
                + cfg.abs_ratio * global_utility_watts(&sc, params, &protected);
            let power = (1.0 - cfg.abs_ratio) * normal.total_watts()
                + cfg.abs_ratio * protected.total_watts();
            let unserved_normal = per_tile_served(&sc, params, &normal);
            let unserved_protected = per_tile_served(&sc, params, &protected);
            let mut unserved_ues: u64 = 0;
            for tile in &sc.tiles {
                if !unserved_normal[tile.id] && !unserved_protected[tile.id] {
                    unserved_ues += tile.ue_count as u64;
                }
            }
            let tput = abs_throughput(&sc, params, cfg, table);
            let max_profile = fixed_profile(&sc, params, BaselineKind::MaxPower);
            Ok(RunReport {
                strategy: cfg.kind.label().to_string(),
                global_utility: utility,
                total_power_w: power,
                unserved_fraction: if sc.total_ues == 0 {
                    0.0
                } else {
                    unserved_ues as f64 / sc.total_ues as f64
                },
                per_user_throughput: tput,
                avg_team_iterations: 0.0,
                strategy_histogram: strategy_histogram(&sc, params, &max_profile),
            })
        }
    }
}

/// Whether each tile clears the threshold on some carrier.
fn per_tile_served(scenario: &Scenario, params: &GameParams, power: &PowerProfile) -> Vec<bool> {
    let c_count = scenario.carrier_count();
    let grid = crate::metrics::sinr_grid(scenario, params, power);
    (0..scenario.tiles.len())
        .map(|z| (0..c_count).any(|c| grid[z * c_count + c] >= params.gamma_min))
        .collect()
}

/// Baseline label parsing for config and CLI surfaces.
pub fn parse_kind(s: &str) -> Option<BaselineKind> {
    match s {
        "max" => Some(BaselineKind::MaxPower),
        "min" => Some(BaselineKind::MinPower),
        "eicic" => Some(BaselineKind::Eicic),
        "lp_abs" => Some(BaselineKind::LpAbs),
        _ => None,
    }
}

impl core::str::FromStr for BaselineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_kind(s).ok_or_else(|| alloc::format!("unknown baseline kind: {s}"))
    }
}

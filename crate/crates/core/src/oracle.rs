//! Brute-force ground truth for toy-sized instances: exhaustive best
//! replies, exhaustive joint optima, and Nash-equilibrium enumeration
//! and verification.
//!
//! Everything here recomputes payoffs from the raw scenario with no
//! caching, deliberately sharing no evaluation code with the solver's
//! enumeration loop (only the [`PreferenceOrder`] tie-break is shared,
//! since it is part of the game definition).

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::game::{
    sigmoid, sinr_watts, GameParams, PowerProfile, StrategyProfile,
};
use crate::scenario::Scenario;
use crate::solver::PreferenceOrder;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// The requested enumeration exceeds the size guard.
    SizeGuard { space: f64, limit: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SizeGuard { space, limit } => {
                write!(f, "enumeration space {space:.3e} exceeds guard {limit:.3e}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

pub const BEST_REPLY_GUARD: f64 = 1e7;
pub const JOINT_GUARD: f64 = 1e8;
pub const NE_ENUMERATION_GUARD: f64 = 1e7;

/// Single-carrier payoff of team `t` holding the column encoded in
/// `power`, coverage and power price over `settled + {c}`. Plain
/// re-summation of the game equations.
fn single_carrier_payoff(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
    c: usize,
    settled: &[usize],
) -> f64 {
    let team = &scenario.teams[t];
    let e_t = team.total_ues as f64;
    let xi = params.xi.for_team(t);

    let mut utility = 0.0;
    let mut unserved: u64 = 0;
    for &sid in &team.locations {
        for &z in &scenario.tiles_by_station[sid] {
            let weight = if e_t > 0.0 { scenario.tiles[z].ue_count as f64 / e_t } else { 0.0 };
            let gamma = sinr_watts(scenario, params, power, t, z, c);
            utility += weight * sigmoid(params.alpha, params.beta, gamma);
            let already = settled
                .iter()
                .any(|&cc| sinr_watts(scenario, params, power, t, z, cc) >= params.gamma_min);
            if !already && gamma < params.gamma_min {
                unserved += scenario.tiles[z].ue_count as u64;
            }
        }
    }
    let e = if e_t > 0.0 { unserved as f64 / e_t } else { 0.0 };

    let mut pwr = 0.0;
    for (lp, &sid) in team.locations.iter().enumerate() {
        for cc in 0..scenario.carrier_count() {
            if cc == c || settled.contains(&cc) {
                pwr += scenario.mean_attenuation[sid][cc] * power.watts(t, lp, cc);
            }
        }
    }
    let cost = xi * pwr + params.delta * e;
    utility - cost
}

/// Full payoff of team `t` with utility, coverage and power price over
/// all carriers.
pub fn full_payoff(scenario: &Scenario, params: &GameParams, profile: &StrategyProfile, t: usize) -> f64 {
    let all: Vec<usize> = (0..scenario.carrier_count()).collect();
    crate::game::team_payoff(scenario, params, profile, t, &all)
}

fn column_space(levels: usize, locations: usize) -> f64 {
    libm::pow(levels as f64, locations as f64)
}

/// Exhaustive scan of team `t`'s column candidates on carrier `c`,
/// evaluated from scratch and resolved with [`PreferenceOrder`].
pub fn exhaustive_best_reply(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
    c: usize,
    settled: &[usize],
) -> Result<Vec<usize>, OracleError> {
    let locations = scenario.teams[t].locations.len();
    let n_levels = params.levels.len();
    let space = column_space(n_levels, locations);
    if space > BEST_REPLY_GUARD {
        return Err(OracleError::SizeGuard { space, limit: BEST_REPLY_GUARD });
    }

    let mut candidate = profile.clone();
    let mut idx = vec![0usize; locations];
    let mut best_idx: Vec<usize> = Vec::new();
    let mut best_payoff = f64::NEG_INFINITY;
    loop {
        candidate.teams[t].set_column(c, &idx);
        let power = candidate.realize(scenario, &params.levels);
        let payoff = single_carrier_payoff(scenario, params, &power, t, c, settled);
        let take = if payoff > best_payoff {
            true
        } else if payoff == best_payoff {
            PreferenceOrder::compare(scenario, params, t, &idx, &best_idx) == Ordering::Less
        } else {
            false
        };
        if take {
            best_idx = idx.clone();
            best_payoff = payoff;
        }
        if !increment(&mut idx, n_levels) {
            return Ok(best_idx);
        }
    }
}

fn increment(idx: &mut [usize], base: usize) -> bool {
    let mut pos = idx.len();
    loop {
        if pos == 0 {
            return false;
        }
        pos -= 1;
        idx[pos] += 1;
        if idx[pos] < base {
            return true;
        }
        idx[pos] = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    PayoffSum,
    UtilitySum,
}

/// Global maximizer of the summed objective over the entire joint
/// strategy space. Ties resolve by lower total watts, then by the
/// lexicographically smaller flattened index vector.
pub fn exhaustive_joint_optimum(
    scenario: &Scenario,
    params: &GameParams,
    objective: Objective,
) -> Result<StrategyProfile, OracleError> {
    let c_count = scenario.carrier_count();
    let digits: usize = scenario.teams.iter().map(|t| t.locations.len() * c_count).sum();
    let n_levels = params.levels.len();
    let space = column_space(n_levels, digits);
    if space > JOINT_GUARD {
        return Err(OracleError::SizeGuard { space, limit: JOINT_GUARD });
    }

    let all: Vec<usize> = (0..c_count).collect();
    let mut idx = vec![0usize; digits];
    let mut best_idx: Option<Vec<usize>> = None;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_watts = f64::INFINITY;
    loop {
        let profile = profile_from_digits(scenario, &idx);
        let power = profile.realize(scenario, &params.levels);
        let value: f64 = match objective {
            Objective::PayoffSum => (0..scenario.teams.len())
                .map(|t| {
                    crate::game::team_utility_watts(scenario, params, &power, t)
                        - crate::game::team_cost_watts(scenario, params, &power, t, &all)
                })
                .sum(),
            Objective::UtilitySum => (0..scenario.teams.len())
                .map(|t| crate::game::team_utility_watts(scenario, params, &power, t))
                .sum(),
        };
        let watts = power.total_watts();
        let take = if value > best_value {
            true
        } else if value == best_value {
            match watts.partial_cmp(&best_watts).unwrap() {
                Ordering::Less => true,
                Ordering::Equal => best_idx.as_deref().map_or(true, |b| idx.as_slice() < b),
                Ordering::Greater => false,
            }
        } else {
            false
        };
        if take {
            best_idx = Some(idx.clone());
            best_value = value;
            best_watts = watts;
        }
        if !increment(&mut idx, n_levels) {
            return Ok(profile_from_digits(scenario, &best_idx.unwrap()));
        }
    }
}

/// Decode a flat digit vector (teams in order, row-major (l, c) within
/// each) into a profile.
fn profile_from_digits(scenario: &Scenario, digits: &[usize]) -> StrategyProfile {
    let c_count = scenario.carrier_count();
    let mut profile = StrategyProfile::zero(scenario);
    let mut pos = 0;
    for (t, team) in scenario.teams.iter().enumerate() {
        for lp in 0..team.locations.len() {
            for c in 0..c_count {
                profile.teams[t].set(lp, c, digits[pos]);
                pos += 1;
            }
        }
    }
    profile
}

/// Outcome of a Nash-equilibrium check.
#[derive(Debug, Clone, PartialEq)]
pub struct NeVerdict {
    pub is_ne: bool,
    /// First strictly improving single-(team, carrier) column deviation
    /// found, with the payoff gain.
    pub improvement: Option<(usize, usize, Vec<usize>, f64)>,
}

/// Check every single-(team, carrier) column replacement for a strict
/// payoff improvement (payoff taken over all carriers).
pub fn verify_ne(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
) -> Result<NeVerdict, OracleError> {
    let c_count = scenario.carrier_count();
    let n_levels = params.levels.len();
    for t in 0..scenario.teams.len() {
        let locations = scenario.teams[t].locations.len();
        let space = column_space(n_levels, locations);
        if space > BEST_REPLY_GUARD {
            return Err(OracleError::SizeGuard { space, limit: BEST_REPLY_GUARD });
        }
        let current = full_payoff(scenario, params, profile, t);
        for c in 0..c_count {
            let mut idx = vec![0usize; locations];
            let mut deviant = profile.clone();
            loop {
                if idx != profile.teams[t].column(c) {
                    deviant.teams[t].set_column(c, &idx);
                    let payoff = full_payoff(scenario, params, &deviant, t);
                    if payoff > current {
                        return Ok(NeVerdict {
                            is_ne: false,
                            improvement: Some((t, c, idx, payoff - current)),
                        });
                    }
                }
                if !increment(&mut idx, n_levels) {
                    break;
                }
            }
        }
    }
    Ok(NeVerdict { is_ne: true, improvement: None })
}

/// All pure fixed points of the single-carrier best-reply map (with its
/// preference tie-break), found by scanning the joint column space on
/// `carrier` with every other carrier silent.
pub fn enumerate_nes(
    scenario: &Scenario,
    params: &GameParams,
    carrier: usize,
) -> Result<Vec<StrategyProfile>, OracleError> {
    let n_levels = params.levels.len();
    let digits: usize = scenario.teams.iter().map(|t| t.locations.len()).sum();
    let space = column_space(n_levels, digits);
    if space > NE_ENUMERATION_GUARD {
        return Err(OracleError::SizeGuard { space, limit: NE_ENUMERATION_GUARD });
    }

    let mut idx = vec![0usize; digits];
    let mut fixed_points = Vec::new();
    loop {
        let mut profile = StrategyProfile::zero(scenario);
        let mut pos = 0;
        for (t, team) in scenario.teams.iter().enumerate() {
            for lp in 0..team.locations.len() {
                profile.teams[t].set(lp, carrier, idx[pos]);
                pos += 1;
            }
        }
        let mut fixed = true;
        for t in 0..scenario.teams.len() {
            let reply = exhaustive_best_reply(scenario, params, &profile, t, carrier, &[])?;
            if reply != profile.teams[t].column(carrier) {
                fixed = false;
                break;
            }
        }
        if fixed {
            fixed_points.push(profile);
        }
        if !increment(&mut idx, n_levels) {
            return Ok(fixed_points);
        }
    }
}

//! Game mathematics: interference, SINR, sigmoid utility, cost, payoff
//! and the calibration of the received-power price.
//!
//! All power arithmetic is in watts (linear domain); dB appears only at
//! IO boundaries. Every function here is a pure function of
//! `(scenario, profile, params)` and safe for concurrent evaluation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub enum GameError {
    InvalidLevels(String),
    InvalidParams(String),
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::InvalidLevels(msg) => write!(f, "invalid power level set: {msg}"),
            GameError::InvalidParams(msg) => write!(f, "invalid game parameters: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GameError {}

/// Ordered set of discrete power fractions, from 0 (off) to 1 (maximum).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerLevelSet {
    fractions: Vec<f64>,
}

impl PowerLevelSet {
    pub fn new(fractions: Vec<f64>) -> Result<Self, GameError> {
        if fractions.len() < 2 {
            return Err(GameError::InvalidLevels("need at least two levels".into()));
        }
        if fractions[0] != 0.0 {
            return Err(GameError::InvalidLevels("first level must be 0".into()));
        }
        if *fractions.last().unwrap() != 1.0 {
            return Err(GameError::InvalidLevels("last level must be 1".into()));
        }
        if fractions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GameError::InvalidLevels("levels must be strictly increasing".into()));
        }
        Ok(PowerLevelSet { fractions })
    }

    /// The reference set {0, 0.1, ..., 1.0}.
    pub fn default_eleven() -> Self {
        PowerLevelSet { fractions: (0..=10).map(|i| i as f64 / 10.0).collect() }
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn fraction(&self, index: usize) -> f64 {
        self.fractions[index]
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    /// Index of the lowest level greater than 0.
    pub fn min_active_index(&self) -> usize {
        1
    }

    pub fn max_index(&self) -> usize {
        self.fractions.len() - 1
    }
}

/// One team's action: an L x C matrix of power level indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Strategy {
    locations: usize,
    carriers: usize,
    /// Row-major over (location, carrier).
    entries: Vec<usize>,
}

impl Strategy {
    pub fn zero(locations: usize, carriers: usize) -> Self {
        Strategy { locations, carriers, entries: vec![0; locations * carriers] }
    }

    pub fn uniform(locations: usize, carriers: usize, index: usize) -> Self {
        Strategy { locations, carriers, entries: vec![index; locations * carriers] }
    }

    #[inline]
    pub fn get(&self, location: usize, carrier: usize) -> usize {
        self.entries[location * self.carriers + carrier]
    }

    #[inline]
    pub fn set(&mut self, location: usize, carrier: usize, index: usize) {
        self.entries[location * self.carriers + carrier] = index;
    }

    pub fn column(&self, carrier: usize) -> Vec<usize> {
        (0..self.locations).map(|l| self.get(l, carrier)).collect()
    }

    pub fn set_column(&mut self, carrier: usize, column: &[usize]) {
        debug_assert_eq!(column.len(), self.locations);
        for (l, &idx) in column.iter().enumerate() {
            self.set(l, carrier, idx);
        }
    }

    pub fn locations(&self) -> usize {
        self.locations
    }

    pub fn carriers(&self) -> usize {
        self.carriers
    }
}

/// Complete game state: one strategy per team.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategyProfile {
    pub teams: Vec<Strategy>,
}

impl StrategyProfile {
    pub fn zero(scenario: &Scenario) -> Self {
        let c = scenario.carrier_count();
        StrategyProfile {
            teams: scenario.teams.iter().map(|t| Strategy::zero(t.locations.len(), c)).collect(),
        }
    }

    pub fn uniform(scenario: &Scenario, index: usize) -> Self {
        let c = scenario.carrier_count();
        StrategyProfile {
            teams: scenario
                .teams
                .iter()
                .map(|t| Strategy::uniform(t.locations.len(), c, index))
                .collect(),
        }
    }

    /// Realized transmit powers in watts, per team, row-major (l, c).
    pub fn realize(&self, scenario: &Scenario, levels: &PowerLevelSet) -> PowerProfile {
        let c = scenario.carrier_count();
        let mut teams = Vec::with_capacity(self.teams.len());
        for (team, strat) in scenario.teams.iter().zip(&self.teams) {
            let mut watts = Vec::with_capacity(team.locations.len() * c);
            for (lp, &sid) in team.locations.iter().enumerate() {
                let max = scenario.stations[sid].max_power_w;
                for cc in 0..c {
                    watts.push(levels.fraction(strat.get(lp, cc)) * max);
                }
            }
            teams.push(watts);
        }
        PowerProfile { carriers: c, teams }
    }
}

/// Realized transmit powers in watts; the common currency of all SINR
/// math. Baselines that are not expressible on the discrete level grid
/// (reduced-power subframes) build these directly.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    carriers: usize,
    /// Per team, row-major over (location position, carrier).
    teams: Vec<Vec<f64>>,
}

impl PowerProfile {
    pub fn new(carriers: usize, teams: Vec<Vec<f64>>) -> Self {
        PowerProfile { carriers, teams }
    }

    pub fn zero(scenario: &Scenario) -> Self {
        let c = scenario.carrier_count();
        PowerProfile {
            carriers: c,
            teams: scenario.teams.iter().map(|t| vec![0.0; t.locations.len() * c]).collect(),
        }
    }

    #[inline]
    pub fn watts(&self, team: usize, location_pos: usize, carrier: usize) -> f64 {
        self.teams[team][location_pos * self.carriers + carrier]
    }

    #[inline]
    pub fn set_watts(&mut self, team: usize, location_pos: usize, carrier: usize, w: f64) {
        self.teams[team][location_pos * self.carriers + carrier] = w;
    }

    pub fn total_watts(&self) -> f64 {
        self.teams.iter().flat_map(|t| t.iter()).sum()
    }

    pub fn carriers(&self) -> usize {
        self.carriers
    }
}

/// The received-power price: a single network-wide value or one per team.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum XiPrice {
    Global(f64),
    PerTeam(Vec<f64>),
}

impl XiPrice {
    #[inline]
    pub fn for_team(&self, team: usize) -> f64 {
        match self {
            XiPrice::Global(v) => *v,
            XiPrice::PerTeam(v) => v[team],
        }
    }
}

/// All tunable game parameters. SINR values enter the sigmoid and the
/// coverage threshold in linear units.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GameParams {
    /// Sigmoid steepness.
    pub alpha: f64,
    /// Sigmoid center (linear SINR).
    pub beta: f64,
    /// Price per received power (1/watt).
    pub xi: XiPrice,
    /// Price per unserved-user fraction.
    pub delta: f64,
    /// Coverage threshold (linear SINR).
    pub gamma_min: f64,
    /// Noise power per carrier (watts).
    pub noise_w: f64,
    pub levels: PowerLevelSet,
}

impl GameParams {
    pub fn validate(&self) -> Result<(), GameError> {
        if !(self.alpha > 0.0) {
            return Err(GameError::InvalidParams("alpha must be positive".into()));
        }
        let xi_ok = match &self.xi {
            XiPrice::Global(v) => *v >= 0.0,
            XiPrice::PerTeam(v) => v.iter().all(|x| *x >= 0.0),
        };
        if !xi_ok || self.delta < 0.0 {
            return Err(GameError::InvalidParams("prices must be nonnegative".into()));
        }
        if !(self.noise_w > 0.0) || !(self.gamma_min > 0.0) {
            return Err(GameError::InvalidParams("noise and gamma_min must be positive".into()));
        }
        Ok(())
    }
}

/// Reference parameters: alpha = beta = 1, delta = 0.6, -10 dB threshold
/// and -98 dBm noise over a 10 MHz carrier. `xi` starts at zero and is
/// normally filled in via [`calibrate_xi`].
pub fn default_params() -> GameParams {
    GameParams {
        alpha: 1.0,
        beta: 1.0,
        xi: XiPrice::Global(0.0),
        delta: 0.6,
        gamma_min: libm::pow(10.0, -10.0 / 10.0),
        noise_w: libm::pow(10.0, -12.8),
        levels: PowerLevelSet::default_eleven(),
    }
}

#[inline]
pub fn sigmoid(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let x = -alpha * (gamma - beta);
    // exp underflows to exactly 0.0 below -746 and overflows to infinity
    // above 710, so the result is exact without the call. This is the
    // hottest function in candidate enumeration.
    if x <= -746.0 {
        return 1.0;
    }
    if x >= 710.0 {
        return 0.0;
    }
    1.0 / (1.0 + libm::exp(x))
}

/// Inter-team interference seen by one team's tiles, in watts.
/// `values` is row-major over (tile position in `tiles`, carrier).
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceMatrix {
    pub tiles: Vec<usize>,
    pub carriers: usize,
    pub values: Vec<f64>,
}

impl InterferenceMatrix {
    #[inline]
    pub fn get(&self, tile_pos: usize, carrier: usize) -> f64 {
        self.values[tile_pos * self.carriers + carrier]
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }
}

/// Interference caused to team `t` by all other teams' transmissions,
/// summed in (team, location) order.
pub fn interference_watts(scenario: &Scenario, power: &PowerProfile, t: usize) -> InterferenceMatrix {
    let c_count = scenario.carrier_count();
    let tiles = scenario.teams[t].tiles.clone();
    let mut values = vec![0.0; tiles.len() * c_count];
    for other in &scenario.teams {
        if other.id == t {
            continue;
        }
        for (lp, &sid) in other.locations.iter().enumerate() {
            for (zp, &z) in tiles.iter().enumerate() {
                for c in 0..c_count {
                    values[zp * c_count + c] +=
                        power.watts(other.id, lp, c) * scenario.attenuation.get(sid, z, c);
                }
            }
        }
    }
    InterferenceMatrix { tiles, carriers: c_count, values }
}

/// Interference matrix for team `t` under an index-based profile.
pub fn interference(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
) -> InterferenceMatrix {
    interference_watts(scenario, &profile.realize(scenario, &params.levels), t)
}

/// SINR of one (tile, carrier) pair given precomputed inter-team
/// interference. Intra-team terms are summed in team location order.
#[inline]
pub fn sinr_with_interference(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
    tile: usize,
    carrier: usize,
    inter: f64,
) -> f64 {
    let team = &scenario.teams[t];
    let serving = scenario.tiles[tile].serving;
    let mut num = 0.0;
    let mut intra = 0.0;
    for (lp, &sid) in team.locations.iter().enumerate() {
        let rx = power.watts(t, lp, carrier) * scenario.attenuation.get(sid, tile, carrier);
        if sid == serving {
            num = rx;
        } else {
            intra += rx;
        }
    }
    num / (params.noise_w + intra + inter)
}

/// SINR at `tile` (which must belong to team `t`) on `carrier`.
pub fn sinr(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
    tile: usize,
    carrier: usize,
) -> f64 {
    let power = profile.realize(scenario, &params.levels);
    sinr_watts(scenario, params, &power, t, tile, carrier)
}

/// SINR under a watt-level profile.
pub fn sinr_watts(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
    tile: usize,
    carrier: usize,
) -> f64 {
    let mut inter = 0.0;
    for other in &scenario.teams {
        if other.id == t {
            continue;
        }
        for (lp, &sid) in other.locations.iter().enumerate() {
            inter += power.watts(other.id, lp, carrier)
                * scenario.attenuation.get(sid, tile, carrier);
        }
    }
    sinr_with_interference(scenario, params, power, t, tile, carrier, inter)
}

/// Team utility: UE-weighted sigmoid of linear SINR, summed over the
/// team's tiles and all carriers. Bounded by (0, C).
pub fn team_utility(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
) -> f64 {
    team_utility_watts(scenario, params, &profile.realize(scenario, &params.levels), t)
}

pub fn team_utility_watts(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
) -> f64 {
    let team = &scenario.teams[t];
    if team.total_ues == 0 {
        return 0.0;
    }
    let inter = interference_watts(scenario, power, t);
    let c_count = scenario.carrier_count();
    let e_t = team.total_ues as f64;
    let mut u = 0.0;
    let mut zp = 0;
    for &sid in &team.locations {
        for &z in &scenario.tiles_by_station[sid] {
            let w = scenario.tiles[z].ue_count as f64 / e_t;
            for c in 0..c_count {
                let g = sinr_with_interference(
                    scenario,
                    params,
                    power,
                    t,
                    z,
                    c,
                    inter.get(zp, c),
                );
                u += w * sigmoid(params.alpha, params.beta, g);
            }
            zp += 1;
        }
    }
    u
}

/// Fraction of the team's UEs whose SINR is below `gamma_min` on every
/// carrier in `settled`.
pub fn unserved_fraction(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
    settled: &[usize],
) -> f64 {
    unserved_fraction_watts(scenario, params, &profile.realize(scenario, &params.levels), t, settled)
}

pub fn unserved_fraction_watts(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
    settled: &[usize],
) -> f64 {
    let team = &scenario.teams[t];
    if team.total_ues == 0 {
        return 0.0;
    }
    team_unserved_counts(scenario, params, power, t, settled) as f64 / team.total_ues as f64
}

/// Number of team UEs whose SINR is below `gamma_min` on every carrier in
/// `settled`.
pub fn team_unserved_counts(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
    settled: &[usize],
) -> u64 {
    assert!(!settled.is_empty(), "need at least one settled carrier");
    let team = &scenario.teams[t];
    let inter = interference_watts(scenario, power, t);
    let mut unserved: u64 = 0;
    let mut zp = 0;
    for &sid in &team.locations {
        for &z in &scenario.tiles_by_station[sid] {
            let served = settled.iter().any(|&c| {
                sinr_with_interference(scenario, params, power, t, z, c, inter.get(zp, c))
                    >= params.gamma_min
            });
            if !served {
                unserved += scenario.tiles[z].ue_count as u64;
            }
            zp += 1;
        }
    }
    unserved
}

/// Total team cost: received-power price over the carriers in `settled`
/// plus the unserved-fraction price. During sequential per-carrier play
/// `settled` holds the decided carriers; for final reporting it holds all
/// carriers.
pub fn team_cost(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
    settled: &[usize],
) -> f64 {
    team_cost_watts(scenario, params, &profile.realize(scenario, &params.levels), t, settled)
}

pub fn team_cost_watts(
    scenario: &Scenario,
    params: &GameParams,
    power: &PowerProfile,
    t: usize,
    settled: &[usize],
) -> f64 {
    let team = &scenario.teams[t];
    let xi = params.xi.for_team(t);
    let mut pwr = 0.0;
    for (lp, &sid) in team.locations.iter().enumerate() {
        for c in 0..scenario.carrier_count() {
            if settled.contains(&c) {
                pwr += scenario.mean_attenuation[sid][c] * power.watts(t, lp, c);
            }
        }
    }
    xi * pwr + params.delta * unserved_fraction_watts(scenario, params, power, t, settled)
}

/// Team payoff: utility minus cost.
pub fn team_payoff(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
    settled: &[usize],
) -> f64 {
    let power = profile.realize(scenario, &params.levels);
    team_utility_watts(scenario, params, &power, t)
        - team_cost_watts(scenario, params, &power, t, settled)
}

/// Per-team received-power prices `xi_t = k * alpha / mean(I_t)`, with
/// the mean interference taken under the half-maximum-power profile.
pub fn calibrate_xi(scenario: &Scenario, params: &GameParams, k: f64) -> Vec<f64> {
    assert!(k >= 0.0);
    let half = half_power_profile(scenario);
    scenario
        .teams
        .iter()
        .map(|team| {
            let mean = interference_watts(scenario, &half, team.id).mean();
            if mean > 0.0 {
                k * params.alpha / mean
            } else {
                0.0
            }
        })
        .collect()
}

/// Single network-wide price `xi = k * alpha / mean(I)`, with the mean
/// taken over every team's interference entries under the same
/// half-maximum-power profile. This is the one number a network operator
/// would compute centrally.
pub fn calibrate_xi_global(scenario: &Scenario, params: &GameParams, k: f64) -> f64 {
    assert!(k >= 0.0);
    let half = half_power_profile(scenario);
    let mut sum = 0.0;
    let mut count = 0usize;
    for team in &scenario.teams {
        let im = interference_watts(scenario, &half, team.id);
        sum += im.values.iter().sum::<f64>();
        count += im.values.len();
    }
    if count == 0 || sum <= 0.0 {
        return 0.0;
    }
    k * params.alpha / (sum / count as f64)
}

fn half_power_profile(scenario: &Scenario) -> PowerProfile {
    let c = scenario.carrier_count();
    PowerProfile {
        carriers: c,
        teams: scenario
            .teams
            .iter()
            .map(|team| {
                let mut w = Vec::with_capacity(team.locations.len() * c);
                for &sid in &team.locations {
                    for _ in 0..c {
                        w.push(0.5 * scenario.stations[sid].max_power_w);
                    }
                }
                w
            })
            .collect(),
    }
}

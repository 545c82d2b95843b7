//! Per-carrier best-reply dynamics and the multi-carrier sequence.
//!
//! Each team's best reply enumerates its full per-carrier candidate set
//! (`|P|^L` index vectors) against the frozen strategies of the others.
//! Inter-team interference is computed once per reply; serving and
//! intra-team terms are recomputed per candidate. Per-carrier games run
//! round-robin until a full round passes with no change; carriers are
//! played in descending frequency order, each settled carrier feeding the
//! coverage term of the later ones.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::game::{sigmoid, GameParams, StrategyProfile};
use crate::game::interference_watts;
use crate::scenario::Scenario;

/// Full rounds before a per-carrier game is declared non-convergent.
pub const DEFAULT_ROUND_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    /// The round-robin loop did not reach a fixed point within the cap.
    IterationCapExceeded { carrier: usize, rounds: usize },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::IterationCapExceeded { carrier, rounds } => write!(
                f,
                "per-carrier game on carrier {carrier} did not converge within {rounds} rounds"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}

/// Deterministic total order over equal-payoff candidate columns:
/// 1. lower total realized watts;
/// 2. lexicographically larger power vector over the micro locations read
///    in increasing macro distance order (more power closer to the
///    center);
/// 3. lower index vector (plain determinism; the higher-frequency-first
///    preference is realized structurally by the carrier game order).
pub struct PreferenceOrder;

impl PreferenceOrder {
    /// `Ordering::Less` means `a` is preferred. Only identical columns
    /// compare `Equal`.
    pub fn compare(scenario: &Scenario, params: &GameParams, team: usize, a: &[usize], b: &[usize]) -> Ordering {
        let watts_a = Self::column_watts(scenario, params, team, a);
        let watts_b = Self::column_watts(scenario, params, team, b);
        match watts_a.partial_cmp(&watts_b).unwrap() {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Micro locations come after the leader, already ordered by
        // distance from the macro.
        for lp in 1..a.len() {
            match b[lp].cmp(&a[lp]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        a.cmp(b)
    }

    /// Total realized watts of a candidate column, summed in location
    /// order.
    pub fn column_watts(scenario: &Scenario, params: &GameParams, team: usize, column: &[usize]) -> f64 {
        let mut total = 0.0;
        for (lp, &sid) in scenario.teams[team].locations.iter().enumerate() {
            total += params.levels.fraction(column[lp]) * scenario.stations[sid].max_power_w;
        }
        total
    }
}

/// Payoff breakdown of a chosen column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnEval {
    pub payoff: f64,
    pub utility: f64,
    pub cost: f64,
    pub column_watts: f64,
}

/// One best-reply event in the round-robin loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    /// Global iteration counter (one per single BPS execution).
    pub iteration: usize,
    pub round: usize,
    pub team: usize,
    pub carrier: usize,
    pub column: Vec<usize>,
    pub changed: bool,
    pub payoff: f64,
    pub utility: f64,
    pub cost: f64,
    pub column_watts: f64,
}

/// Record of a full run: per-iteration events and per-carrier round
/// counts. The trace of a converged carrier ends with one full round of
/// unchanged strategies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GameTrace {
    pub events: Vec<TraceEvent>,
    /// (carrier, rounds to convergence).
    pub rounds_per_carrier: Vec<(usize, usize)>,
    pub converged: bool,
}

impl GameTrace {
    /// Average, over teams, of the plays each team needed to settle on
    /// its final strategy: per carrier, the last round in which the team
    /// changed its column (at least one, since every team must play once
    /// to rule out a change). Trailing verification rounds after a team
    /// has settled are not charged to it.
    pub fn iterations_per_team(&self) -> f64 {
        let mut teams = 0usize;
        // (team, carrier) -> last changed round, discovered on the fly.
        let mut last: alloc::collections::BTreeMap<(usize, usize), usize> =
            alloc::collections::BTreeMap::new();
        for ev in &self.events {
            teams = teams.max(ev.team + 1);
            let entry = last.entry((ev.team, ev.carrier)).or_insert(1);
            if ev.changed {
                *entry = ev.round;
            }
        }
        if teams == 0 {
            return 0.0;
        }
        let total: usize = last.values().sum();
        total as f64 / teams as f64
    }

    /// Total plays per team: the summed round counts, identical for every
    /// team under round-robin play.
    pub fn rounds_total(&self) -> f64 {
        self.rounds_per_carrier.iter().map(|&(_, r)| r as f64).sum()
    }
}

/// Best reply of team `t` on carrier `c`: the preference-ordered argmax
/// over all `|P|^L` candidate columns against the frozen profile.
///
/// The coverage term counts `settled + {c}`; the power term likewise, so
/// a carrier's game never pays for undecided carriers.
pub fn best_reply_single_carrier(
    scenario: &Scenario,
    params: &GameParams,
    profile: &StrategyProfile,
    t: usize,
    c: usize,
    settled: &[usize],
) -> (Vec<usize>, ColumnEval) {
    let team = &scenario.teams[t];
    let locations = team.locations.len();
    let n_levels = params.levels.len();
    let c_count = scenario.carrier_count();
    let power = profile.realize(scenario, &params.levels);
    let inter = interference_watts(scenario, &power, t);
    let xi = params.xi.for_team(t);
    let e_t = team.total_ues as f64;

    // Tile-order caches. `gains[lp]` holds a(sid, z, c) for the team's
    // tiles in team order; `weights`/`ues` follow the same order.
    let mut gains: Vec<Vec<f64>> = vec![Vec::with_capacity(team.tiles.len()); locations];
    let mut weights: Vec<f64> = Vec::with_capacity(team.tiles.len());
    let mut ues: Vec<u64> = Vec::with_capacity(team.tiles.len());
    let mut serving_pos: Vec<usize> = Vec::with_capacity(team.tiles.len());
    for (lp, &sid) in team.locations.iter().enumerate() {
        for &z in &scenario.tiles_by_station[sid] {
            for (lp2, &sid2) in team.locations.iter().enumerate() {
                gains[lp2].push(scenario.attenuation.get(sid2, z, c));
            }
            weights.push(if e_t > 0.0 { scenario.tiles[z].ue_count as f64 / e_t } else { 0.0 });
            ues.push(scenario.tiles[z].ue_count as u64);
            serving_pos.push(lp);
        }
    }
    let n_tiles = weights.len();
    let inter_c: Vec<f64> = (0..n_tiles).map(|zp| inter.get(zp, c)).collect();

    // Coverage already secured on settled carriers is frozen for the
    // duration of this reply.
    let already_served: Vec<bool> = {
        let mut served = vec![false; n_tiles];
        let mut zp = 0;
        for &sid in &team.locations {
            for &z in &scenario.tiles_by_station[sid] {
                served[zp] = settled.iter().any(|&cc| {
                    crate::game::sinr_with_interference(
                        scenario, params, &power, t, z, cc, inter.get(zp, cc),
                    ) >= params.gamma_min
                });
                zp += 1;
            }
        }
        served
    };

    let max_power: Vec<f64> =
        team.locations.iter().map(|&sid| scenario.stations[sid].max_power_w).collect();
    let mean_atten: Vec<&[f64]> =
        team.locations.iter().map(|&sid| scenario.mean_attenuation[sid].as_slice()).collect();

    // Power-price terms per location in carrier order. The variable term
    // holds the attenuation coefficient; settled carriers contribute
    // constants, undecided carriers nothing.
    enum PwrTerm {
        Var(f64),
        Const(f64),
    }
    let pwr_terms: Vec<Vec<PwrTerm>> = (0..locations)
        .map(|lp| {
            (0..c_count)
                .filter_map(|cc| {
                    if cc == c {
                        Some(PwrTerm::Var(mean_atten[lp][cc]))
                    } else if settled.contains(&cc) {
                        Some(PwrTerm::Const(mean_atten[lp][cc] * power.watts(t, lp, cc)))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let fractions: Vec<f64> = (0..n_levels).map(|i| params.levels.fraction(i)).collect();
    // Upper bound on the utility term of any candidate: the sigmoid never
    // exceeds one, and floating-point summation of termwise-dominated
    // sequences preserves the ordering, so the weight sum taken in tile
    // order bounds every utility taken in the same order.
    let weight_cap: f64 = {
        let mut w = 0.0;
        for zp in 0..n_tiles {
            w += weights[zp];
        }
        w
    };

    // Depth-first enumeration over locations. `partial[d][zp]` carries
    // the intra-team interference chain over locations below `d` (the
    // serving one skipped), summed in location order exactly as a flat
    // rescan would; `pwr_prefix[d]` carries the power-price chain the
    // same way, so leaf payoffs are bit-identical to a full recompute.
    //
    // Two prunes cut subtrees that provably contain neither a winner nor
    // a tie, which leaves the selected column unchanged because the
    // (payoff, preference-order) argmax is unique and independent of
    // visit order:
    // - cheap: total tile weight minus the committed power price;
    // - tight: per decided tile, the sigmoid of the SINR with only the
    //   interference committed so far (interference can only grow along
    //   the subtree and every step of the bound is monotone under
    //   floating-point rounding), undecided tiles counted at full
    //   weight.
    // Each digit visits the team's current level first so that in quiet
    // rounds the incumbent is optimal from the first leaf on and the
    // bounds prune maximally.
    struct Search<'a> {
        n_levels: usize,
        locations: usize,
        n_tiles: usize,
        xi: f64,
        e_t: f64,
        weight_cap: f64,
        fractions: &'a [f64],
        max_power: &'a [f64],
        pwr_terms: &'a [Vec<PwrTerm>],
        gains: &'a [Vec<f64>],
        weights: &'a [f64],
        ues: &'a [u64],
        serving_pos: &'a [usize],
        already_served: &'a [bool],
        inter_c: &'a [f64],
        current: Vec<usize>,
        idx: Vec<usize>,
        partial: Vec<Vec<f64>>,
        num_at: Vec<f64>,
        pwr_prefix: Vec<f64>,
        best_idx: Vec<usize>,
        best: ColumnEval,
    }

    impl Search<'_> {
        fn descend(&mut self, scenario: &Scenario, params: &GameParams, t: usize, depth: usize) {
            let seed = self.current[depth];
            for ord in 0..self.n_levels {
                // Current level first, then the rest in ascending order.
                let level = match ord {
                    0 => seed,
                    _ if ord <= seed => ord - 1,
                    _ => ord,
                };
                self.idx[depth] = level;
                let w = self.fractions[level] * self.max_power[depth];
                let mut pwr = self.pwr_prefix[depth];
                for term in &self.pwr_terms[depth] {
                    match term {
                        PwrTerm::Var(coef) => pwr += coef * w,
                        PwrTerm::Const(v) => pwr += v,
                    }
                }
                self.pwr_prefix[depth + 1] = pwr;
                if self.xi > 0.0 && self.weight_cap - self.xi * pwr < self.best.payoff {
                    continue;
                }
                let (lower, upper) = self.partial.split_at_mut(depth + 1);
                let src = &lower[depth];
                let dst = &mut upper[0];
                let g = &self.gains[depth];
                for zp in 0..self.n_tiles {
                    if self.serving_pos[zp] == depth {
                        self.num_at[zp] = w * g[zp];
                        dst[zp] = src[zp];
                    } else {
                        dst[zp] = src[zp] + w * g[zp];
                    }
                }
                if depth + 1 == self.locations {
                    self.evaluate(scenario, params, t);
                } else {
                    let mut cap = 0.0;
                    for zp in 0..self.n_tiles {
                        cap += if self.serving_pos[zp] <= depth {
                            let gamma_ub = self.num_at[zp]
                                / (params.noise_w + self.partial[depth + 1][zp] + self.inter_c[zp]);
                            self.weights[zp] * sigmoid(params.alpha, params.beta, gamma_ub)
                        } else {
                            self.weights[zp]
                        };
                    }
                    if cap - self.xi * pwr < self.best.payoff {
                        continue;
                    }
                    self.descend(scenario, params, t, depth + 1);
                }
            }
        }

        fn evaluate(&mut self, scenario: &Scenario, params: &GameParams, t: usize) {
            let intra = &self.partial[self.locations];
            let mut utility = 0.0;
            let mut unserved: u64 = 0;
            for zp in 0..self.n_tiles {
                let gamma = self.num_at[zp] / (params.noise_w + intra[zp] + self.inter_c[zp]);
                utility += self.weights[zp] * sigmoid(params.alpha, params.beta, gamma);
                if !self.already_served[zp] && gamma < params.gamma_min {
                    unserved += self.ues[zp];
                }
            }
            let e = if self.e_t > 0.0 { unserved as f64 / self.e_t } else { 0.0 };
            let cost = self.xi * self.pwr_prefix[self.locations] + params.delta * e;
            let payoff = utility - cost;

            let take = if payoff > self.best.payoff {
                true
            } else if payoff == self.best.payoff {
                PreferenceOrder::compare(scenario, params, t, &self.idx, &self.best_idx)
                    == Ordering::Less
            } else {
                false
            };
            if take {
                let column_watts = PreferenceOrder::column_watts(scenario, params, t, &self.idx);
                self.best_idx.clear();
                self.best_idx.extend_from_slice(&self.idx);
                self.best = ColumnEval { payoff, utility, cost, column_watts };
            }
        }
    }

    let mut search = Search {
        n_levels,
        locations,
        n_tiles,
        xi,
        e_t,
        weight_cap,
        fractions: &fractions,
        max_power: &max_power,
        pwr_terms: &pwr_terms,
        gains: &gains,
        weights: &weights,
        ues: &ues,
        serving_pos: &serving_pos,
        already_served: &already_served,
        inter_c: &inter_c,
        current: profile.teams[t].column(c),
        idx: vec![0; locations],
        partial: vec![vec![0.0; n_tiles]; locations + 1],
        num_at: vec![0.0; n_tiles],
        pwr_prefix: vec![0.0; locations + 1],
        best_idx: Vec::new(),
        best: ColumnEval { payoff: f64::NEG_INFINITY, utility: 0.0, cost: 0.0, column_watts: 0.0 },
    };
    search.descend(scenario, params, t, 0);
    let Search { best_idx, best, .. } = search;
    (best_idx, best)
}

/// Round-robin best replies on one carrier from the all-zero column until
/// a full round passes with no change. Returns the rounds used.
pub fn play_carrier_game(
    scenario: &Scenario,
    params: &GameParams,
    profile: &mut StrategyProfile,
    carrier: usize,
    settled: &[usize],
    trace: &mut GameTrace,
    round_cap: usize,
) -> Result<usize, SolverError> {
    let order: Vec<usize> = (0..scenario.teams.len()).collect();
    play_carrier_game_with_order(scenario, params, profile, carrier, settled, trace, round_cap, &order)
}

/// [`play_carrier_game`] with an explicit team order; used to test that
/// the outcome from the zero start does not depend on it.
///
/// Best-reply play can enter a persistent cycle when several teams
/// anti-coordinate over contested edge tiles (the coverage price is
/// discontinuous there, so the usual monotonicity argument does not
/// apply). A repeated joint state is detected deterministically, and one
/// of the teams that moved within the cycle sits out a single round,
/// which breaks the synchronization and lets the others settle around
/// it. Convergence is still declared only after a full round in which
/// every team played and nobody moved, so the returned profile is a
/// genuine best-reply fixed point; if the play keeps cycling, the round
/// cap aborts it as before.
#[allow(clippy::too_many_arguments)]
pub fn play_carrier_game_with_order(
    scenario: &Scenario,
    params: &GameParams,
    profile: &mut StrategyProfile,
    carrier: usize,
    settled: &[usize],
    trace: &mut GameTrace,
    round_cap: usize,
    order: &[usize],
) -> Result<usize, SolverError> {
    for strat in profile.teams.iter_mut() {
        let zeros = vec![0usize; strat.locations()];
        strat.set_column(carrier, &zeros);
    }
    let mut iteration = trace.events.len();
    // Joint state -> round it was last seen in, for cycle detection.
    let mut seen: alloc::collections::BTreeMap<Vec<usize>, usize> =
        alloc::collections::BTreeMap::new();
    let mut skip: Option<usize> = None;
    let mut skip_rotation = 0usize;
    for round in 1..=round_cap {
        let skipped = skip.take();
        let mut changed = 0usize;
        for &t in order {
            if Some(t) == skipped {
                continue;
            }
            let (column, eval) = best_reply_single_carrier(scenario, params, profile, t, carrier, settled);
            let moved = profile.teams[t].column(carrier) != column;
            if moved {
                profile.teams[t].set_column(carrier, &column);
                changed += 1;
            }
            iteration += 1;
            trace.events.push(TraceEvent {
                iteration,
                round,
                team: t,
                carrier,
                column,
                changed: moved,
                payoff: eval.payoff,
                utility: eval.utility,
                cost: eval.cost,
                column_watts: eval.column_watts,
            });
        }
        if changed == 0 && skipped.is_none() {
            trace.rounds_per_carrier.push((carrier, round));
            return Ok(round);
        }
        let signature: Vec<usize> = profile
            .teams
            .iter()
            .flat_map(|s| s.column(carrier))
            .collect();
        if let Some(&first) = seen.get(&signature) {
            // Teams that moved since the state was first recorded are the
            // cycle participants; sit one of them out next round, a
            // different one on every detection.
            let mut movers: Vec<usize> = trace
                .events
                .iter()
                .rev()
                .take_while(|ev| ev.round > first && ev.carrier == carrier)
                .filter(|ev| ev.changed)
                .map(|ev| ev.team)
                .collect();
            movers.sort_unstable();
            movers.dedup();
            if !movers.is_empty() {
                skip = Some(movers[skip_rotation % movers.len()]);
                skip_rotation += 1;
            }
            // The skip changes the trajectory; stale states must not
            // retrigger on the new path.
            seen.clear();
        }
        seen.insert(signature, round);
    }
    Err(SolverError::IterationCapExceeded { carrier, rounds: round_cap })
}

/// Run the per-carrier game for every carrier in descending frequency
/// order (the scenario's carrier order), folding each settled carrier
/// into the coverage term of the later games.
pub fn run_multicarrier(
    scenario: &Scenario,
    params: &GameParams,
) -> Result<(StrategyProfile, GameTrace), SolverError> {
    run_multicarrier_capped(scenario, params, DEFAULT_ROUND_CAP)
}

/// [`run_multicarrier`] with an explicit per-carrier round cap.
pub fn run_multicarrier_capped(
    scenario: &Scenario,
    params: &GameParams,
    round_cap: usize,
) -> Result<(StrategyProfile, GameTrace), SolverError> {
    let mut profile = StrategyProfile::zero(scenario);
    let mut trace = GameTrace::default();
    let mut settled: Vec<usize> = Vec::new();
    for c in 0..scenario.carrier_count() {
        play_carrier_game(scenario, params, &mut profile, c, &settled, &mut trace, round_cap)?;
        settled.push(c);
    }
    trace.converged = true;
    Ok((profile, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{default_params, XiPrice};
    use crate::scenario::{
        AttenuationTensor, BaseStation, BsKind, CarrierSpec, Scenario, Team, Tile,
    };
    use alloc::vec;

    fn two_team_toy() -> Scenario {
        let carriers =
            vec![CarrierSpec { id: 0, center_frequency_hz: 2.0e9, bandwidth_hz: 10e6 }];
        let stations = vec![
            BaseStation { id: 0, kind: BsKind::Macro, position: (0.0, 0.0), max_power_w: 10.0, team: 0 },
            BaseStation { id: 1, kind: BsKind::Macro, position: (800.0, 0.0), max_power_w: 10.0, team: 1 },
        ];
        let teams = vec![
            Team { id: 0, leader: 0, locations: vec![0], tiles: vec![], total_ues: 0 },
            Team { id: 1, leader: 1, locations: vec![1], tiles: vec![], total_ues: 0 },
        ];
        let tiles = vec![
            Tile { id: 0, center: (0.0, 50.0), ue_count: 4, serving: 0 },
            Tile { id: 1, center: (800.0, 50.0), ue_count: 4, serving: 1 },
        ];
        let tensor = AttenuationTensor {
            stations: 2,
            tiles: 2,
            carriers: 1,
            values: vec![1e-7, 1e-9, 1e-9, 1e-7],
        };
        Scenario::assemble(carriers, stations, teams, tiles, tensor).unwrap()
    }

    #[test]
    fn huge_price_forces_zero_column() {
        let sc = two_team_toy();
        let mut params = default_params();
        params.delta = 0.0;
        params.xi = XiPrice::Global(1e12);
        let profile = StrategyProfile::zero(&sc);
        let (col, _) = best_reply_single_carrier(&sc, &params, &profile, 0, 0, &[]);
        assert_eq!(col, vec![0]);
    }

    #[test]
    fn preference_prefers_lower_watts() {
        let sc = two_team_toy();
        let params = default_params();
        assert_eq!(PreferenceOrder::compare(&sc, &params, 0, &[3], &[5]), Ordering::Less);
        assert_eq!(PreferenceOrder::compare(&sc, &params, 0, &[5], &[3]), Ordering::Greater);
        assert_eq!(PreferenceOrder::compare(&sc, &params, 0, &[4], &[4]), Ordering::Equal);
    }

    #[test]
    fn single_team_converges_in_one_effective_round() {
        let carriers =
            vec![CarrierSpec { id: 0, center_frequency_hz: 2.0e9, bandwidth_hz: 10e6 }];
        let stations = vec![BaseStation {
            id: 0, kind: BsKind::Macro, position: (0.0, 0.0), max_power_w: 10.0, team: 0,
        }];
        let teams = vec![Team { id: 0, leader: 0, locations: vec![0], tiles: vec![], total_ues: 0 }];
        let tiles = vec![Tile { id: 0, center: (0.0, 50.0), ue_count: 4, serving: 0 }];
        let tensor =
            AttenuationTensor { stations: 1, tiles: 1, carriers: 1, values: vec![1e-7] };
        let sc = Scenario::assemble(carriers, stations, teams, tiles, tensor).unwrap();
        let params = default_params();
        let mut profile = StrategyProfile::zero(&sc);
        let mut trace = GameTrace::default();
        let rounds =
            play_carrier_game(&sc, &params, &mut profile, 0, &[], &mut trace, DEFAULT_ROUND_CAP)
                .unwrap();
        assert_eq!(rounds, 2); // one improving round plus the quiet round
        let (standalone, _) = best_reply_single_carrier(&sc, &params, &StrategyProfile::zero(&sc), 0, 0, &[]);
        assert_eq!(profile.teams[0].column(0), standalone);
    }

    #[test]
    fn multicarrier_single_carrier_degenerates() {
        let sc = two_team_toy();
        let params = default_params();
        let (profile, trace) = run_multicarrier(&sc, &params).unwrap();
        let mut profile2 = StrategyProfile::zero(&sc);
        let mut trace2 = GameTrace::default();
        play_carrier_game(&sc, &params, &mut profile2, 0, &[], &mut trace2, DEFAULT_ROUND_CAP)
            .unwrap();
        assert_eq!(profile, profile2);
        assert_eq!(trace.rounds_per_carrier, trace2.rounds_per_carrier);
    }
}

//! World construction: base station layout, tile tessellation, user
//! distribution and the precomputed attenuation tensor.
//!
//! Everything here is deterministic given a [`ScenarioSpec`]; the produced
//! [`Scenario`] is immutable and shared read-only by the game math.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Links shorter than this are evaluated at this distance (meters).
pub const MIN_LINK_DISTANCE_M: f64 = 10.0;

/// Lower clamp on linear attenuation; keeps every gain strictly positive.
pub const ATTENUATION_FLOOR: f64 = 1e-18;

/// Nominal coverage disc radius of a micro station (meters), used both to
/// reject overlapping placements and as the default hotspot radius.
pub const MICRO_DISC_RADIUS_M: f64 = 40.0;

/// Micros are placed at this fraction of the inter-site distance from
/// their macro.
pub const MICRO_PLACEMENT_FRACTION: f64 = 0.35;

/// Average number of tiles per team targeted when the tile size is not
/// given explicitly (2478 tiles / 57 teams in the reference layout).
pub const TILES_PER_TEAM: f64 = 2478.0 / 57.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    /// Micro coverage discs would overlap at the requested density.
    MicroPlacement { micros: u32, isd_m: f64 },
    InvalidSpec(String),
    /// Structural validation of assembled parts failed.
    Inconsistent(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::MicroPlacement { micros, isd_m } => write!(
                f,
                "cannot place {micros} non-overlapping micros per sector at isd {isd_m} m"
            ),
            ScenarioError::InvalidSpec(msg) => write!(f, "invalid scenario spec: {msg}"),
            ScenarioError::Inconsistent(msg) => write!(f, "inconsistent scenario: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioError {}

/// One component carrier: a center frequency and a bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CarrierSpec {
    pub id: usize,
    pub center_frequency_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BsKind {
    Macro,
    Micro,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaseStation {
    pub id: usize,
    pub kind: BsKind,
    /// Position in meters.
    pub position: (f64, f64),
    pub max_power_w: f64,
    pub team: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tile {
    pub id: usize,
    /// Center in meters.
    pub center: (f64, f64),
    /// Number of UEs inside the tile.
    pub ue_count: u32,
    /// Serving base station id (nearest under the default association).
    pub serving: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Team {
    pub id: usize,
    /// Macro station acting as team leader.
    pub leader: usize,
    /// Station ids: macro first, then micros by increasing distance from
    /// the macro (ties by station id).
    pub locations: Vec<usize>,
    /// Tiles served by any of the team's stations (filled on assembly).
    pub tiles: Vec<usize>,
    /// Total UEs over the team's tiles (filled on assembly).
    pub total_ues: u64,
}

/// Linear power gains `a[station][tile][carrier]`, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttenuationTensor {
    pub stations: usize,
    pub tiles: usize,
    pub carriers: usize,
    /// Row-major over (station, tile, carrier).
    pub values: Vec<f64>,
}

impl AttenuationTensor {
    #[inline]
    pub fn get(&self, station: usize, tile: usize, carrier: usize) -> f64 {
        self.values[(station * self.tiles + tile) * self.carriers + carrier]
    }
}

/// Parameters for deterministic scenario generation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioSpec {
    /// Hexagonal rings of sites around the center site (2 gives 19 sites).
    pub rings: u32,
    pub isd_m: f64,
    pub micros_per_macro: u32,
    /// Keep only this many teams (nearest to the grid center) if set.
    pub team_count: Option<usize>,
    /// Square tile edge; derived from [`TILES_PER_TEAM`] when `None`.
    pub tile_size_m: Option<f64>,
    pub total_ues: u32,
    /// UE density inside micro hotspots relative to elsewhere.
    pub hotspot_ratio: f64,
    pub hotspot_radius_m: f64,
    pub seed: u64,
    pub carriers: Vec<CarrierSpec>,
    pub macro_power_w: f64,
    pub micro_power_w: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            rings: 2,
            isd_m: 500.0,
            micros_per_macro: 4,
            team_count: None,
            tile_size_m: None,
            total_ues: 34_400,
            hotspot_ratio: 3.0,
            hotspot_radius_m: 60.0,
            seed: 1,
            carriers: default_carriers(),
            macro_power_w: 20.0,
            micro_power_w: 1.0,
        }
    }
}

/// The three reference carriers: 2.6 GHz, 1.8 GHz and 800 MHz, 10 MHz each.
pub fn default_carriers() -> Vec<CarrierSpec> {
    vec![
        CarrierSpec { id: 0, center_frequency_hz: 2.6e9, bandwidth_hz: 10e6 },
        CarrierSpec { id: 1, center_frequency_hz: 1.8e9, bandwidth_hz: 10e6 },
        CarrierSpec { id: 2, center_frequency_hz: 0.8e9, bandwidth_hz: 10e6 },
    ]
}

/// The immutable world consumed by all game math.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Carriers in strictly descending center frequency.
    pub carriers: Vec<CarrierSpec>,
    pub stations: Vec<BaseStation>,
    pub teams: Vec<Team>,
    pub tiles: Vec<Tile>,
    pub attenuation: AttenuationTensor,
    pub total_ues: u64,
    /// Tiles served by each station, in tile-id order.
    pub tiles_by_station: Vec<Vec<usize>>,
    /// Mean attenuation over a station's own served tiles, per carrier.
    /// Zero for stations serving no tiles.
    pub mean_attenuation: Vec<Vec<f64>>,
}

/// Log-distance urban pathloss in dB. Distances are floored at
/// [`MIN_LINK_DISTANCE_M`]; the frequency term preserves the coverage
/// diversity between carriers.
pub fn pathloss_db(kind: BsKind, distance_m: f64, frequency_hz: f64) -> f64 {
    let d_km = distance_m.max(MIN_LINK_DISTANCE_M) / 1000.0;
    let f_term = 21.0 * libm::log10(frequency_hz / 2.0e9);
    match kind {
        BsKind::Macro => 128.1 + 37.6 * libm::log10(d_km) + f_term,
        BsKind::Micro => 140.7 + 36.7 * libm::log10(d_km) + f_term,
    }
}

/// Linear attenuation for one link, clamped into `[ATTENUATION_FLOOR, 1]`.
pub fn attenuation(kind: BsKind, distance_m: f64, frequency_hz: f64) -> f64 {
    let a = libm::pow(10.0, -pathloss_db(kind, distance_m, frequency_hz) / 10.0);
    a.clamp(ATTENUATION_FLOOR, 1.0)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    libm::hypot(a.0 - b.0, a.1 - b.1)
}

/// Build the hexagonal site grid with 3 sector macros per site and
/// `micros_per_macro` micros per sector. One team per sector.
///
/// Sector macros are modeled as co-located omni stations whose service
/// areas are the 120-degree wedges around the site. Micros sit at
/// `0.35 * isd` from the site, at azimuths evenly spread inside the wedge.
pub fn build_layout(
    rings: u32,
    isd_m: f64,
    micros_per_macro: u32,
    macro_power_w: f64,
    micro_power_w: f64,
) -> Result<(Vec<BaseStation>, Vec<Team>), ScenarioError> {
    if isd_m <= 0.0 {
        return Err(ScenarioError::InvalidSpec("isd must be positive".into()));
    }
    if macro_power_w <= 0.0 || micro_power_w <= 0.0 || macro_power_w < micro_power_w {
        return Err(ScenarioError::InvalidSpec(
            "powers must be positive with macro >= micro".into(),
        ));
    }
    if micros_per_macro > 0 {
        // Adjacent micros (within and across sector borders) are separated
        // by the chord at the placement radius.
        let spacing_deg = 120.0 / micros_per_macro as f64;
        let chord =
            2.0 * MICRO_PLACEMENT_FRACTION * isd_m * libm::sin(spacing_deg.to_radians() / 2.0);
        if chord < 2.0 * MICRO_DISC_RADIUS_M {
            return Err(ScenarioError::MicroPlacement { micros: micros_per_macro, isd_m });
        }
    }

    // Axial hex coordinates: all (q, r) with max(|q|, |r|, |q+r|) <= rings.
    let mut sites: Vec<(f64, f64)> = Vec::new();
    let n = rings as i64;
    for q in -n..=n {
        for r in -n..=n {
            if (q + r).abs() > n {
                continue;
            }
            let x = isd_m * (q as f64 + r as f64 / 2.0);
            let y = isd_m * (libm::sqrt(3.0) / 2.0) * r as f64;
            sites.push((x, y));
        }
    }
    // Deterministic site order: by (y, x).
    sites.sort_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap());

    let mut stations = Vec::new();
    let mut teams = Vec::new();
    for site in &sites {
        for sector in 0..3u32 {
            let team_id = teams.len();
            let macro_id = stations.len();
            stations.push(BaseStation {
                id: macro_id,
                kind: BsKind::Macro,
                position: *site,
                max_power_w: macro_power_w,
                team: team_id,
            });
            let mut locations = vec![macro_id];
            for m in 0..micros_per_macro {
                let az = (sector as f64 * 120.0
                    + (m as f64 + 0.5) * 120.0 / micros_per_macro as f64)
                    .to_radians();
                let r = MICRO_PLACEMENT_FRACTION * isd_m;
                let id = stations.len();
                stations.push(BaseStation {
                    id,
                    kind: BsKind::Micro,
                    position: (site.0 + r * libm::cos(az), site.1 + r * libm::sin(az)),
                    max_power_w: micro_power_w,
                    team: team_id,
                });
                locations.push(id);
            }
            teams.push(Team { id: team_id, leader: macro_id, locations, tiles: Vec::new(), total_ues: 0 });
        }
    }
    Ok((stations, teams))
}

/// Keep the `count` teams whose site is closest to the origin and drop the
/// rest, renumbering stations and teams densely.
pub fn truncate_teams(
    stations: &[BaseStation],
    teams: &[Team],
    count: usize,
) -> Result<(Vec<BaseStation>, Vec<Team>), ScenarioError> {
    if count == 0 || count > teams.len() {
        return Err(ScenarioError::InvalidSpec(format!(
            "team_count {count} outside 1..={}",
            teams.len()
        )));
    }
    let mut order: Vec<usize> = (0..teams.len()).collect();
    order.sort_by(|&a, &b| {
        let da = dist(stations[teams[a].leader].position, (0.0, 0.0));
        let db = dist(stations[teams[b].leader].position, (0.0, 0.0));
        (da, a).partial_cmp(&(db, b)).unwrap()
    });
    order.truncate(count);
    order.sort_unstable();

    let mut station_map = vec![usize::MAX; stations.len()];
    let mut new_stations = Vec::new();
    let mut new_teams = Vec::new();
    for (new_tid, &tid) in order.iter().enumerate() {
        let team = &teams[tid];
        let mut locations = Vec::with_capacity(team.locations.len());
        for &sid in &team.locations {
            let new_sid = new_stations.len();
            station_map[sid] = new_sid;
            let mut bs = stations[sid].clone();
            bs.id = new_sid;
            bs.team = new_tid;
            new_stations.push(bs);
            locations.push(new_sid);
        }
        new_teams.push(Team {
            id: new_tid,
            leader: station_map[team.leader],
            locations,
            tiles: Vec::new(),
            total_ues: 0,
        });
    }
    Ok((new_stations, new_teams))
}

/// Square tiles covering the station bounding box inflated by `margin_m`,
/// each assigned to its nearest station. Co-located stations (sector
/// macros) split the surrounding azimuths into equal wedges by id order.
pub fn tessellate(stations: &[BaseStation], tile_size_m: f64, margin_m: f64) -> Vec<Tile> {
    assert!(tile_size_m > 0.0, "tile size must be positive");
    let min_x = stations.iter().map(|s| s.position.0).fold(f64::INFINITY, f64::min) - margin_m;
    let max_x = stations.iter().map(|s| s.position.0).fold(f64::NEG_INFINITY, f64::max) + margin_m;
    let min_y = stations.iter().map(|s| s.position.1).fold(f64::INFINITY, f64::min) - margin_m;
    let max_y = stations.iter().map(|s| s.position.1).fold(f64::NEG_INFINITY, f64::max) + margin_m;
    let nx = libm::ceil((max_x - min_x) / tile_size_m) as usize;
    let ny = libm::ceil((max_y - min_y) / tile_size_m) as usize;

    // For wedge resolution: how many stations share each position, and the
    // rank of each station within its co-located group (id order).
    let group_info: Vec<(usize, usize)> = stations
        .iter()
        .map(|s| {
            let mut size = 0;
            let mut rank = 0;
            for other in stations {
                if other.position == s.position {
                    if other.id < s.id {
                        rank += 1;
                    }
                    size += 1;
                }
            }
            (size, rank)
        })
        .collect();

    let mut tiles = Vec::with_capacity(nx * ny);
    for row in 0..ny {
        for col in 0..nx {
            let center = (
                min_x + (col as f64 + 0.5) * tile_size_m,
                min_y + (row as f64 + 0.5) * tile_size_m,
            );
            let mut best: Option<(f64, usize)> = None;
            for s in stations {
                let (group, rank) = group_info[s.id];
                if group > 1 {
                    // Wedge k covers azimuths [k, k+1) * 2*pi/group.
                    let az = libm::atan2(center.1 - s.position.1, center.0 - s.position.0);
                    let az = if az < 0.0 { az + core::f64::consts::TAU } else { az };
                    let wedge = ((az / (core::f64::consts::TAU / group as f64)) as usize)
                        .min(group - 1);
                    if wedge != rank {
                        continue;
                    }
                }
                let d = dist(center, s.position);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, s.id));
                }
            }
            tiles.push(Tile {
                id: tiles.len(),
                center,
                ue_count: 0,
                serving: best.expect("at least one station").1,
            });
        }
    }
    tiles
}

/// Distribute `total_ues` over the tiles with density `hotspot_ratio`
/// times higher inside the hotspot discs around micro stations.
///
/// Uses largest-remainder rounding so the counts sum exactly; remainder
/// ties are broken by a permutation drawn from `seed`.
pub fn distribute_ues(
    tiles: &mut [Tile],
    stations: &[BaseStation],
    total_ues: u32,
    hotspot_ratio: f64,
    hotspot_radius_m: f64,
    seed: u64,
) {
    assert!(total_ues > 0 && hotspot_ratio >= 1.0);
    let micros: Vec<(f64, f64)> = stations
        .iter()
        .filter(|s| s.kind == BsKind::Micro)
        .map(|s| s.position)
        .collect();
    let weights: Vec<f64> = tiles
        .iter()
        .map(|t| {
            let hot = micros.iter().any(|&m| dist(t.center, m) <= hotspot_radius_m);
            if hot { hotspot_ratio } else { 1.0 }
        })
        .collect();
    let weight_sum: f64 = weights.iter().sum();

    let mut assigned: u64 = 0;
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(tiles.len());
    for (tile, w) in tiles.iter_mut().zip(&weights) {
        let quota = total_ues as f64 * w / weight_sum;
        let floor = libm::floor(quota);
        tile.ue_count = floor as u32;
        assigned += floor as u64;
        remainders.push((tile.id, quota - floor));
    }
    let mut leftover = total_ues as u64 - assigned;

    // Seeded permutation decides among equal remainders.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tie_rank: Vec<usize> = (0..tiles.len()).collect();
    tie_rank.shuffle(&mut rng);
    remainders.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap().then_with(|| tie_rank[a.0].cmp(&tie_rank[b.0]))
    });
    let mut i = 0;
    while leftover > 0 {
        tiles[remainders[i].0].ue_count += 1;
        leftover -= 1;
        i = (i + 1) % remainders.len();
    }
}

/// Precompute `a[station][tile][carrier]` from the pathloss model.
pub fn compute_attenuation(
    stations: &[BaseStation],
    tiles: &[Tile],
    carriers: &[CarrierSpec],
) -> AttenuationTensor {
    let mut values = Vec::with_capacity(stations.len() * tiles.len() * carriers.len());
    for s in stations {
        for t in tiles {
            let d = dist(s.position, t.center);
            for c in carriers {
                values.push(attenuation(s.kind, d, c.center_frequency_hz));
            }
        }
    }
    AttenuationTensor {
        stations: stations.len(),
        tiles: tiles.len(),
        carriers: carriers.len(),
        values,
    }
}

impl Scenario {
    /// Deterministic end-to-end construction from a spec.
    pub fn generate(spec: &ScenarioSpec) -> Result<Scenario, ScenarioError> {
        if spec.carriers.is_empty() {
            return Err(ScenarioError::InvalidSpec("no carriers".into()));
        }
        let (stations, teams) = build_layout(
            spec.rings,
            spec.isd_m,
            spec.micros_per_macro,
            spec.macro_power_w,
            spec.micro_power_w,
        )?;
        let (stations, teams) = match spec.team_count {
            Some(n) => truncate_teams(&stations, &teams, n)?,
            None => (stations, teams),
        };
        let tile_size = match spec.tile_size_m {
            Some(ts) => {
                if ts <= 0.0 {
                    return Err(ScenarioError::InvalidSpec("tile size must be positive".into()));
                }
                ts
            }
            None => {
                let margin = spec.isd_m / 2.0;
                let min_x =
                    stations.iter().map(|s| s.position.0).fold(f64::INFINITY, f64::min) - margin;
                let max_x = stations.iter().map(|s| s.position.0).fold(f64::NEG_INFINITY, f64::max)
                    + margin;
                let min_y =
                    stations.iter().map(|s| s.position.1).fold(f64::INFINITY, f64::min) - margin;
                let max_y = stations.iter().map(|s| s.position.1).fold(f64::NEG_INFINITY, f64::max)
                    + margin;
                let target = (TILES_PER_TEAM * teams.len() as f64).max(1.0);
                libm::sqrt((max_x - min_x) * (max_y - min_y) / target)
            }
        };
        let mut tiles = tessellate(&stations, tile_size, spec.isd_m / 2.0);
        distribute_ues(
            &mut tiles,
            &stations,
            spec.total_ues,
            spec.hotspot_ratio,
            spec.hotspot_radius_m,
            spec.seed,
        );
        let tensor = compute_attenuation(&stations, &tiles, &spec.carriers);
        Scenario::assemble(spec.carriers.clone(), stations, teams, tiles, tensor)
    }

    /// Assemble and validate a scenario from explicit parts. Team tile
    /// lists, UE totals and the mean-attenuation table are (re)derived
    /// from the tiles' serving assignments.
    pub fn assemble(
        carriers: Vec<CarrierSpec>,
        stations: Vec<BaseStation>,
        mut teams: Vec<Team>,
        tiles: Vec<Tile>,
        attenuation: AttenuationTensor,
    ) -> Result<Scenario, ScenarioError> {
        for w in carriers.windows(2) {
            if w[0].center_frequency_hz <= w[1].center_frequency_hz {
                return Err(ScenarioError::Inconsistent(
                    "carriers must have strictly descending frequency".into(),
                ));
            }
        }
        for c in &carriers {
            if c.center_frequency_hz <= 0.0 || c.bandwidth_hz <= 0.0 {
                return Err(ScenarioError::Inconsistent("carrier with non-positive value".into()));
            }
        }
        if attenuation.stations != stations.len()
            || attenuation.tiles != tiles.len()
            || attenuation.carriers != carriers.len()
        {
            return Err(ScenarioError::Inconsistent("attenuation tensor dimensions".into()));
        }
        if attenuation.values.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(ScenarioError::Inconsistent("attenuation outside (0, 1]".into()));
        }

        let mut membership = vec![false; stations.len()];
        let loc_count = teams.first().map_or(0, |t| t.locations.len());
        for team in &teams {
            if team.locations.len() != loc_count {
                return Err(ScenarioError::Inconsistent("unequal team sizes".into()));
            }
            if team.locations.first() != Some(&team.leader)
                || stations[team.leader].kind != BsKind::Macro
            {
                return Err(ScenarioError::Inconsistent("team leader must be the first, macro location".into()));
            }
            for &sid in &team.locations {
                if membership[sid] || stations[sid].team != team.id {
                    return Err(ScenarioError::Inconsistent("station team membership".into()));
                }
                membership[sid] = true;
            }
        }
        if membership.iter().any(|m| !m) {
            return Err(ScenarioError::Inconsistent("station without a team".into()));
        }

        let mut tiles_by_station: Vec<Vec<usize>> = vec![Vec::new(); stations.len()];
        for tile in &tiles {
            if tile.serving >= stations.len() {
                return Err(ScenarioError::Inconsistent("tile serving id out of range".into()));
            }
            tiles_by_station[tile.serving].push(tile.id);
        }
        let mut total_ues: u64 = 0;
        for team in teams.iter_mut() {
            team.tiles.clear();
            team.total_ues = 0;
            for &sid in &team.locations {
                for &z in &tiles_by_station[sid] {
                    team.tiles.push(z);
                    team.total_ues += tiles[z].ue_count as u64;
                }
            }
            total_ues += team.total_ues;
        }

        let mut mean_attenuation = vec![vec![0.0; carriers.len()]; stations.len()];
        for (sid, served) in tiles_by_station.iter().enumerate() {
            if served.is_empty() {
                continue;
            }
            for c in 0..carriers.len() {
                let sum: f64 = served.iter().map(|&z| attenuation.get(sid, z, c)).sum();
                mean_attenuation[sid][c] = sum / served.len() as f64;
            }
        }

        Ok(Scenario {
            carriers,
            stations,
            teams,
            tiles,
            attenuation,
            total_ues,
            tiles_by_station,
            mean_attenuation,
        })
    }

    pub fn carrier_count(&self) -> usize {
        self.carriers.len()
    }

    pub fn locations_per_team(&self) -> usize {
        self.teams.first().map_or(0, |t| t.locations.len())
    }

    /// Clone of this scenario with tiles re-assigned per `association`
    /// (tile index -> station id). Team tile sets, UE totals and mean
    /// attenuations are re-derived.
    pub fn with_association(&self, association: &[usize]) -> Result<Scenario, ScenarioError> {
        if association.len() != self.tiles.len() {
            return Err(ScenarioError::Inconsistent("association length".into()));
        }
        let mut tiles = self.tiles.clone();
        for (tile, &sid) in tiles.iter_mut().zip(association) {
            tile.serving = sid;
        }
        Scenario::assemble(
            self.carriers.clone(),
            self.stations.clone(),
            self.teams.clone(),
            tiles,
            self.attenuation.clone(),
        )
    }
}

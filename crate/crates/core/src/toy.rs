//! Small randomized instances for cross-checking the solver against the
//! exhaustive oracle. Geometry, pathloss, and association use the same
//! machinery as full builds; only the scale is cut down so brute-force
//! enumeration stays tractable.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scenario::{
    attenuation, AttenuationTensor, BaseStation, BsKind, CarrierSpec, Scenario, Team, Tile,
};

/// Shape of a randomized instance.
#[derive(Debug, Clone, Copy)]
pub struct ToySpec {
    pub teams: usize,
    /// Locations per team; the first is a macro, the rest are micros.
    pub locations: usize,
    pub carriers: usize,
    pub tiles_per_team: usize,
    /// Side of the square arena the team anchors are scattered over, m.
    pub arena_m: f64,
    pub ues_per_tile: u32,
}

impl Default for ToySpec {
    fn default() -> Self {
        ToySpec {
            teams: 2,
            locations: 2,
            carriers: 1,
            tiles_per_team: 6,
            arena_m: 800.0,
            ues_per_tile: 3,
        }
    }
}

fn carrier_set(count: usize) -> Vec<CarrierSpec> {
    // Descending frequency, matching full builds.
    let bands = [2.6e9, 1.8e9, 0.8e9, 0.7e9];
    (0..count)
        .map(|c| CarrierSpec {
            id: c,
            center_frequency_hz: bands[c % bands.len()],
            bandwidth_hz: 10e6,
        })
        .collect()
}

/// Build a randomized instance from a seed. Stations land near random
/// team anchors, tiles scatter across the arena, and attenuation comes
/// from the standard pathloss model, so SINR magnitudes are realistic
/// even at this scale.
pub fn random_toy(seed: u64, spec: &ToySpec) -> Scenario {
    assert!(spec.teams >= 1 && spec.locations >= 1 && spec.carriers >= 1);
    assert!(spec.carriers <= 4, "toy carrier set tops out at 4");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let carriers = carrier_set(spec.carriers);

    let mut stations = Vec::new();
    let mut teams = Vec::new();
    for t in 0..spec.teams {
        let anchor = (
            rng.gen_range(0.0..spec.arena_m),
            rng.gen_range(0.0..spec.arena_m),
        );
        let mut locations = Vec::new();
        for lp in 0..spec.locations {
            let id = stations.len();
            let (kind, max_power_w, spread) = if lp == 0 {
                (BsKind::Macro, 20.0, 30.0)
            } else {
                (BsKind::Micro, 1.0, 250.0)
            };
            let position = (
                anchor.0 + rng.gen_range(-spread..spread),
                anchor.1 + rng.gen_range(-spread..spread),
            );
            stations.push(BaseStation { id, kind, position, max_power_w, team: t });
            locations.push(id);
        }
        teams.push(Team {
            id: t,
            leader: locations[0],
            locations,
            tiles: Vec::new(),
            total_ues: 0,
        });
    }

    let tile_count = spec.tiles_per_team * spec.teams;
    let mut tiles = Vec::with_capacity(tile_count);
    for z in 0..tile_count {
        let center = (
            rng.gen_range(0.0..spec.arena_m),
            rng.gen_range(0.0..spec.arena_m),
        );
        tiles.push(Tile { id: z, center, ue_count: spec.ues_per_tile, serving: 0 });
    }

    let mut values = Vec::with_capacity(stations.len() * tiles.len() * carriers.len());
    for s in &stations {
        for tile in &tiles {
            let d = libm::hypot(s.position.0 - tile.center.0, s.position.1 - tile.center.1);
            for carrier in &carriers {
                values.push(attenuation(s.kind, d, carrier.center_frequency_hz));
            }
        }
    }
    let tensor = AttenuationTensor {
        stations: stations.len(),
        tiles: tiles.len(),
        carriers: carriers.len(),
        values,
    };

    // Associate each tile with its strongest station on the first
    // carrier; every station must serve at least one tile, so claim one
    // per station first by proximity.
    for tile in tiles.iter_mut() {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for s in &stations {
            let rx = s.max_power_w * tensor.get(s.id, tile.id, 0);
            if rx > best.0 {
                best = (rx, s.id);
            }
        }
        tile.serving = best.1;
    }
    for s in &stations {
        if tiles.iter().any(|z| z.serving == s.id) {
            continue;
        }
        let nearest = tiles
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = libm::hypot(s.position.0 - a.center.0, s.position.1 - a.center.1);
                let db = libm::hypot(s.position.0 - b.center.0, s.position.1 - b.center.1);
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        tiles[nearest].serving = s.id;
    }

    Scenario::assemble(carriers, stations, teams, tiles, tensor)
        .expect("toy construction is internally consistent")
}

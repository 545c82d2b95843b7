//! Experiment configuration: a versioned TOML schema whose defaults
//! reproduce the reference setup (57 teams, three carriers, alpha = beta
//! = 1, k = 0.25, delta = 0.6, -10 dB threshold, 20 W / 1 W).

use capow_core::game::{GameParams, PowerLevelSet, XiPrice};
use capow_core::scenario::{CarrierSpec, Scenario, ScenarioSpec};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported config version {found} (expected {SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub game: GameSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub baselines: BaselinesSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: SCHEMA_VERSION,
            scenario: ScenarioSection::default(),
            game: GameSection::default(),
            solver: SolverSection::default(),
            baselines: BaselinesSection::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub rings: u32,
    pub isd_m: f64,
    pub micros_per_macro: u32,
    pub team_count: Option<usize>,
    pub tile_size_m: Option<f64>,
    pub total_ues: u32,
    pub hotspot_ratio: f64,
    pub hotspot_radius_m: f64,
    pub seed: u64,
    pub macro_power_w: f64,
    pub micro_power_w: f64,
    pub carriers: Vec<CarrierSection>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let spec = ScenarioSpec::default();
        ScenarioSection {
            rings: spec.rings,
            isd_m: spec.isd_m,
            micros_per_macro: spec.micros_per_macro,
            team_count: None,
            tile_size_m: None,
            total_ues: spec.total_ues,
            hotspot_ratio: spec.hotspot_ratio,
            hotspot_radius_m: spec.hotspot_radius_m,
            seed: spec.seed,
            macro_power_w: spec.macro_power_w,
            micro_power_w: spec.micro_power_w,
            carriers: spec
                .carriers
                .iter()
                .map(|c| CarrierSection {
                    center_frequency_ghz: c.center_frequency_hz / 1e9,
                    bandwidth_mhz: c.bandwidth_hz / 1e6,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSection {
    pub center_frequency_ghz: f64,
    pub bandwidth_mhz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameSection {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub delta: f64,
    pub gamma_min_db: f64,
    pub noise_dbm: f64,
    pub power_levels: Vec<f64>,
    /// "global": one network-wide price; "per-team": one per team.
    pub xi_mode: XiMode,
}

impl Default for GameSection {
    fn default() -> Self {
        GameSection {
            alpha: 1.0,
            beta: 1.0,
            k: 0.25,
            delta: 0.6,
            gamma_min_db: -10.0,
            noise_dbm: -98.0,
            power_levels: PowerLevelSet::default_eleven().fractions().to_vec(),
            xi_mode: XiMode::Global,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum XiMode {
    Global,
    PerTeam,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub round_cap: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { round_cap: capow_core::solver::DEFAULT_ROUND_CAP }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AbsSection {
    pub cre_bias_db: f64,
    pub abs_ratio: f64,
    /// Macro backoff in dB during protected subframes; omit to mute.
    pub abs_macro_power_reduction_db: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselinesSection {
    pub eicic: AbsSection,
    pub lp_abs: AbsSection,
}

impl Default for BaselinesSection {
    fn default() -> Self {
        let e = capow_core::baselines::BaselineConfig::eicic_default();
        let l = capow_core::baselines::BaselineConfig::lp_abs_default();
        BaselinesSection {
            eicic: AbsSection {
                cre_bias_db: e.cre_bias_db,
                abs_ratio: e.abs_ratio,
                abs_macro_power_reduction_db: e.abs_macro_power_reduction_db,
            },
            lp_abs: AbsSection {
                cre_bias_db: l.cre_bias_db,
                abs_ratio: l.abs_ratio,
                abs_macro_power_reduction_db: l.abs_macro_power_reduction_db,
            },
        }
    }
}

impl Default for AbsSection {
    fn default() -> Self {
        BaselinesSection::default().eicic
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Random 2-team instances to draw.
    pub toys: usize,
    pub seed: u64,
    pub tiles_per_team: usize,
    /// Carriers in each toy; kept small so the joint search fits the
    /// oracle guards.
    pub carriers: usize,
    /// Reduced level grid for the same reason.
    pub power_levels: Vec<f64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            toys: 10,
            seed: 7,
            tiles_per_team: 6,
            carriers: 2,
            power_levels: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: String,
    /// Override for the shipped SINR-to-efficiency table.
    pub rate_table: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: "out".into(), rate_table: None }
    }
}

impl ExperimentConfig {
    pub fn load(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        if cfg.version != SCHEMA_VERSION {
            return Err(ConfigError::Version { found: cfg.version });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        if s.carriers.is_empty() {
            return Err(ConfigError::Invalid("at least one carrier required".into()));
        }
        for w in s.carriers.windows(2) {
            if w[0].center_frequency_ghz <= w[1].center_frequency_ghz {
                return Err(ConfigError::Invalid(
                    "carriers must be listed in strictly descending frequency".into(),
                ));
            }
        }
        for c in &s.carriers {
            if c.center_frequency_ghz <= 0.0 || c.bandwidth_mhz <= 0.0 {
                return Err(ConfigError::Invalid("carrier frequency and bandwidth must be positive".into()));
            }
        }
        if s.isd_m <= 0.0 || s.macro_power_w <= 0.0 || s.micro_power_w <= 0.0 {
            return Err(ConfigError::Invalid("scenario distances and powers must be positive".into()));
        }
        if !(s.hotspot_ratio >= 1.0) {
            return Err(ConfigError::Invalid("hotspot_ratio must be at least 1".into()));
        }
        let g = &self.game;
        if !(g.alpha > 0.0) || !(g.k >= 0.0) || !(g.delta >= 0.0) {
            return Err(ConfigError::Invalid("alpha must be positive; k and delta non-negative".into()));
        }
        PowerLevelSet::new(g.power_levels.clone())
            .map_err(|e| ConfigError::Invalid(format!("power_levels: {e}")))?;
        if self.solver.round_cap == 0 {
            return Err(ConfigError::Invalid("round_cap must be positive".into()));
        }
        for (name, b) in [("eicic", &self.baselines.eicic), ("lp_abs", &self.baselines.lp_abs)] {
            if !(0.0..=1.0).contains(&b.abs_ratio) {
                return Err(ConfigError::Invalid(format!("{name}.abs_ratio must be in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn scenario_spec(&self) -> ScenarioSpec {
        let s = &self.scenario;
        ScenarioSpec {
            rings: s.rings,
            isd_m: s.isd_m,
            micros_per_macro: s.micros_per_macro,
            team_count: s.team_count,
            tile_size_m: s.tile_size_m,
            total_ues: s.total_ues,
            hotspot_ratio: s.hotspot_ratio,
            hotspot_radius_m: s.hotspot_radius_m,
            seed: s.seed,
            carriers: s
                .carriers
                .iter()
                .enumerate()
                .map(|(id, c)| CarrierSpec {
                    id,
                    center_frequency_hz: c.center_frequency_ghz * 1e9,
                    bandwidth_hz: c.bandwidth_mhz * 1e6,
                })
                .collect(),
            macro_power_w: s.macro_power_w,
            micro_power_w: s.micro_power_w,
        }
    }

    /// Game parameters before price calibration (`xi` set to zero).
    pub fn base_params(&self) -> GameParams {
        let g = &self.game;
        GameParams {
            alpha: g.alpha,
            beta: g.beta,
            xi: XiPrice::Global(0.0),
            delta: g.delta,
            gamma_min: 10f64.powf(g.gamma_min_db / 10.0),
            noise_w: 10f64.powf((g.noise_dbm - 30.0) / 10.0),
            levels: PowerLevelSet::new(g.power_levels.clone()).expect("validated"),
        }
    }

    /// Full parameters with `xi` calibrated against the scenario.
    pub fn calibrated_params(&self, scenario: &Scenario) -> GameParams {
        let mut params = self.base_params();
        params.xi = match self.game.xi_mode {
            XiMode::Global => XiPrice::Global(capow_core::game::calibrate_xi_global(
                scenario, &params, self.game.k,
            )),
            XiMode::PerTeam => XiPrice::PerTeam(capow_core::game::calibrate_xi(
                scenario, &params, self.game.k,
            )),
        };
        params
    }
}

//! Run configuration: built-in defaults, overlaid by a JSON file, overlaid by flags.

use std::path::Path;

use pass_isac_core::model::dbm_to_watts;
use pass_isac_core::monte_carlo::McConfig;
use pass_isac_core::multi_pinch::{InitStrategy, SearchConfig};
use pass_isac_core::single_pinch::uniform_alpha_grid;
use pass_isac_core::{Scenario, SystemConfig, SPEED_OF_LIGHT};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    pub carrier_freq_hz: f64,
    pub n_eff: f64,
    pub waveguide_height_m: f64,
    pub y_tx: f64,
    pub y_rx: f64,
    pub power_dbm: f64,
    pub noise_comm_dbm: f64,
    pub noise_sense_dbm: f64,
    pub frame_len: u32,
    pub alpha_s: f64,
    pub antennas: usize,
    /// Minimum pinch spacing in metres; half a free-space wavelength when absent.
    pub min_spacing_m: Option<f64>,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            carrier_freq_hz: 28e9,
            n_eff: 1.4,
            waveguide_height_m: 3.0,
            y_tx: -2.0,
            y_rx: 2.0,
            power_dbm: 10.0,
            noise_comm_dbm: -114.0,
            noise_sense_dbm: -114.0,
            frame_len: 5,
            alpha_s: 10.0,
            antennas: 4,
            min_spacing_m: None,
        }
    }
}

impl SystemParams {
    /// Model constants; the deployment range and loss are set per run.
    pub fn to_config(&self) -> SystemConfig {
        SystemConfig {
            carrier_freq_hz: self.carrier_freq_hz,
            n_eff: self.n_eff,
            waveguide_height_d: self.waveguide_height_m,
            y_tx: self.y_tx,
            y_rx: self.y_rx,
            power_w: dbm_to_watts(self.power_dbm),
            noise_comm_w: dbm_to_watts(self.noise_comm_dbm),
            noise_sense_w: dbm_to_watts(self.noise_sense_dbm),
            frame_len_l: self.frame_len,
            alpha_s: self.alpha_s,
            num_antennas_n: self.antennas,
            min_spacing_delta: self.min_spacing_m.unwrap_or(SPEED_OF_LIGHT / self.carrier_freq_hz / 2.0),
            ..SystemConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitName {
    Midpoint,
    Cc,
    Sc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchParams {
    pub grid_points: usize,
    pub max_iters: usize,
    pub rel_improvement_eps: f64,
    pub init: InitName,
    pub restarts: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        let d = SearchConfig::default();
        Self {
            grid_points: d.grid_points_q,
            max_iters: d.max_iters,
            rel_improvement_eps: d.rel_improvement_eps,
            init: InitName::Midpoint,
            restarts: d.restarts,
        }
    }
}

impl SearchParams {
    pub fn to_config(&self) -> SearchConfig {
        SearchConfig {
            grid_points_q: self.grid_points,
            max_iters: self.max_iters,
            rel_improvement_eps: self.rel_improvement_eps,
            init_strategy: match self.init {
                InitName::Midpoint => InitStrategy::SpreadMidpoint,
                InitName::Cc => InitStrategy::FromCc,
                InitName::Sc => InitStrategy::FromSc,
            },
            restarts: self.restarts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloParams {
    pub dx_m: f64,
    pub dy_m: f64,
    pub trials: usize,
    pub seed: u64,
    pub alpha_points: usize,
    pub z_points: usize,
    pub lossy_db_per_m: f64,
}

impl Default for MonteCarloParams {
    fn default() -> Self {
        let d = McConfig::default();
        Self {
            dx_m: d.dx_m,
            dy_m: d.dy_m,
            trials: d.trials,
            seed: d.seed,
            alpha_points: d.alpha_grid.len(),
            z_points: d.z_points,
            lossy_db_per_m: d.lossy_db_per_m,
        }
    }
}

impl MonteCarloParams {
    pub fn to_config(&self) -> McConfig {
        McConfig {
            dx_m: self.dx_m,
            dy_m: self.dy_m,
            trials: self.trials,
            seed: self.seed,
            alpha_grid: uniform_alpha_grid(self.alpha_points),
            z_points: self.z_points,
            lossy_db_per_m: self.lossy_db_per_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub user_x: f64,
    pub user_y: f64,
    pub target_x: f64,
    pub target_y: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self { user_x: 3.0, user_y: 1.0, target_x: -5.0, target_y: -2.0 }
    }
}

impl ScenarioParams {
    pub fn to_scenario(self) -> Scenario {
        Scenario::new(self.user_x, self.user_y, self.target_x, self.target_y)
    }
}

/// Everything that determines the numbers a command produces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    pub search: SearchParams,
    pub monte_carlo: MonteCarloParams,
    pub scenario: ScenarioParams,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Hex SHA-256 of a serializable value's compact JSON form.
pub fn digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configuration serializes");
    format!("{:x}", Sha256::digest(&bytes))
}

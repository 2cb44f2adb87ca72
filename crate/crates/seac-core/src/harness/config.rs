//! Run configuration: one flat key-value TOML file covering the run, the
//! environment constants, the SAC hyperparameters and the reward weights.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::{Algo, SacConfig};
use crate::env::EnvConfig;
use crate::nn::TimeActivation;
use crate::reward::RewardWeights;

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub algo: Algo,
    pub seed: u64,
    pub total_steps: u64,
    /// Deterministic evaluation cadence during training, in env steps
    /// (0 disables).
    pub eval_every: u64,
    pub eval_episodes: u32,
    /// Periodic checkpoint cadence in env steps (0 keeps only the final one).
    pub checkpoint_every: u64,
    pub output_dir: PathBuf,
    pub time_activation: TimeActivation,
    #[serde(flatten)]
    pub env: EnvConfig,
    #[serde(flatten)]
    pub sac: SacConfig,
    #[serde(flatten)]
    pub reward: RewardWeights,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algo: Algo::Seac,
            seed: 0,
            total_steps: 1_200_000,
            eval_every: 10_000,
            eval_episodes: 100,
            checkpoint_every: 50_000,
            output_dir: PathBuf::from("seac_run"),
            time_activation: TimeActivation::TanhAffine,
            env: EnvConfig::default(),
            sac: SacConfig::default(),
            reward: RewardWeights::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig, HarnessError> {
        let table: toml::Table =
            text.parse().map_err(|e| HarnessError::Config(format!("config parse error: {e}")))?;
        let known = Self::known_keys();
        for key in table.keys() {
            if !known.contains(key.as_str()) {
                return Err(HarnessError::Config(format!("unknown config key '{key}'")));
            }
        }
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e| HarnessError::Config(format!("config value error: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
        Self::from_toml_str(&text)
    }

    /// The accepted key set, derived from the serialized form of the default
    /// config so it can never drift from the struct definitions.
    pub fn known_keys() -> BTreeSet<String> {
        let table = toml::Table::try_from(RunConfig::default()).expect("default config serializes");
        table.keys().cloned().collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.env.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.sac.validate().map_err(HarnessError::Config)?;
        self.reward.validate().map_err(HarnessError::Config)?;
        if self.total_steps == 0 {
            return Err(HarnessError::Config("total_steps must be positive".into()));
        }
        if self.eval_episodes == 0 {
            return Err(HarnessError::Config("eval_episodes must be positive".into()));
        }
        if self.sac.fixed_duration < self.env.duration_min
            || self.sac.fixed_duration > self.env.duration_max
        {
            return Err(HarnessError::Config(format!(
                "fixed_duration {} outside duration range [{}, {}]",
                self.sac.fixed_duration, self.env.duration_min, self.env.duration_max
            )));
        }
        Ok(())
    }
}

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use autodrive_core::neat::NeatConfig;
use autodrive_core::qlearn::QConfig;
use autodrive_core::sim::EnvConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Q,
    Neat,
}

/// One experiment: a map, a learner, seeds and every tunable setting.
///
/// Read from JSON. Missing sections take their defaults; unknown keys are
/// rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Archetype name (`simple-loop`, `map1`, ...) or a track path prefix.
    pub map: String,
    /// Seed for generating archetype maps.
    pub map_seed: u64,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
    pub env: EnvConfig,
    pub q: QConfig,
    pub neat: NeatConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            map: "simple-loop".into(),
            map_seed: 7,
            algorithm: Algorithm::Q,
            seeds: vec![1],
            output_dir: None,
            env: EnvConfig::default(),
            q: QConfig::default(),
            neat: NeatConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("at least one seed is required");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            bail!("seeds must be distinct");
        }
        self.env.validate()?;
        match self.algorithm {
            Algorithm::Q => self.q.validate()?,
            Algorithm::Neat => self.neat.validate()?,
        }
        Ok(())
    }
}

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use uamlanes_core::pipeline::PipelineConfig;
use uamlanes_core::trips::REFERENCE_SEED;
use uamlanes_core::{
    BlockSchedule, CorridorSpec, CostWeights, DispatchParams, InitialState, SolverConfig,
    SweepGrid, SyntheticProfile,
};

/// Everything a command needs, read from one TOML file. Missing sections
/// take the reference values; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub corridor: CorridorSpec,
    pub dispatch: DispatchParams,
    pub weights: CostWeights,
    pub initial: InitialState,
    pub synthetic: SyntheticProfile,
    pub blocks: BlockSchedule,
    pub solver: SolverConfig,
    pub sweep: SweepGrid,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: REFERENCE_SEED,
            out_dir: PathBuf::from("out"),
            corridor: CorridorSpec::reference(),
            dispatch: DispatchParams::reference(),
            weights: CostWeights::reference(),
            initial: InitialState::idle(),
            synthetic: SyntheticProfile::reference(),
            blocks: BlockSchedule::reference(),
            solver: SolverConfig::default(),
            sweep: SweepGrid::reference(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> uamlanes_core::Result<()> {
        self.pipeline().validate()?;
        self.synthetic.validate()?;
        self.sweep.validate()
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            corridor: self.corridor.clone(),
            dispatch: self.dispatch.clone(),
            weights: self.weights,
            initial: self.initial.clone(),
            solver: self.solver.clone(),
            blocks: self.blocks.clone(),
        }
    }

    /// SHA-256 of the effective settings. The output directory is left out
    /// so the same run written to two places hashes the same.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serialises");
        sha256_hex(&bytes)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

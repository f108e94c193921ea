//! Experiment configuration: one JSON document, optionally overridden by
//! command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{Experiment, DEFAULT_EPSILON, DEFAULT_TRIALS};
use crate::configuration::DEFAULT_MAX_ATTEMPTS;
use crate::degrees::DistSpec;
use crate::error::{Error, Result};
use crate::percolation::PercolationKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dist: Option<DistSpec>,
    pub n: usize,
    pub kind: PercolationKind,
    /// Single probability for `analytic` thinned output.
    pub p: Option<f64>,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub tolerance: f64,
    pub simple_only: bool,
    pub max_degree: Option<usize>,
    pub max_attempts: usize,
    /// Output directory (sweep, threshold) or file (generate).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dist: None,
            n: 50_000,
            kind: PercolationKind::Bond,
            p: None,
            p_grid: Vec::new(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            tolerance: 0.02,
            simple_only: false,
            max_degree: None,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn dist(&self) -> Result<&DistSpec> {
        self.dist
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("no degree distribution given".into()))
    }

    /// The config with the output location dropped, as recorded in outputs.
    pub fn canonical(&self) -> Self {
        ExperimentConfig {
            out: None,
            ..self.clone()
        }
    }

    /// SHA-256 of the canonical JSON form, the output location excluded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.canonical()).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn experiment(&self) -> Result<Experiment> {
        Ok(Experiment {
            dist: self.dist()?.clone(),
            n: self.n,
            kind: self.kind,
            trials: self.trials,
            base_seed: self.seed,
            simple_only: self.simple_only,
            max_degree_cap: self.max_degree,
            max_attempts: self.max_attempts,
        })
    }
}

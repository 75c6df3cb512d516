//! TOML run configuration. Every key is optional and command-line flags
//! take precedence.

use std::path::{Path, PathBuf};

use brownlab::brownfield::LogDetPath;
use serde::{Deserialize, Serialize};

use crate::exit::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub rdiag: RdiagConfig,
    pub simulate: SimulateConfig,
    pub field: FieldConfig,
    pub verify: VerifyConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: None,
            threads: None,
            out_dir: PathBuf::from("out"),
            rdiag: RdiagConfig::default(),
            simulate: SimulateConfig::default(),
            field: FieldConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RdiagConfig {
    /// Radius spacing of the emitted CDF table.
    pub step: f64,
}

impl Default for RdiagConfig {
    fn default() -> Self {
        Self { step: 0.005 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub tag: Option<String>,
    pub dim: usize,
    pub seeds: u64,
    pub word: Option<String>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { tag: None, dim: 256, seeds: 1, word: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub grid: usize,
    /// `None` means `1e-6 * ||T||^2`.
    pub epsilon: Option<f64>,
    /// `None` picks schur at epsilon 0 and svd otherwise.
    pub path: Option<LogDetPath>,
    /// `None` means `1.1 * ||T||`.
    pub half_width: Option<f64>,
    pub center: [f64; 2],
    pub dim: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { grid: 256, epsilon: None, path: None, half_width: None, center: [0.0, 0.0], dim: 128 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub quick: bool,
    /// Empty means all criteria.
    pub criteria: Vec<u8>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

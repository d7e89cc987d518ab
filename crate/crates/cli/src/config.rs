use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::Exit;

/// Run settings; a `--config` JSON file supplies defaults that flags override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub depth: Option<usize>,
    pub eps: Vec<f64>,
    pub n: u32,
    pub out: Option<PathBuf>,
    pub grid: usize,
    pub max_sheets: usize,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            tol: 1e-10,
            depth: None,
            eps: vec![1e-1, 1e-2, 1e-3],
            n: 2,
            out: None,
            grid: 1024,
            max_sheets: 2,
            samples: 1000,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| Exit::Invalid(format!("{}: {e}", path.display())).into())
    }

    pub fn validate(&self) -> Result<(), Exit> {
        if self.n < 2 {
            return Err(Exit::Invalid(format!("--N must be at least 2, got {}", self.n)));
        }
        if !(self.tol > 0.0) {
            return Err(Exit::Invalid(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Exit::Invalid("--eps values must be positive".into()));
        }
        if self.grid < 16 {
            return Err(Exit::Invalid(format!("--grid must be at least 16, got {}", self.grid)));
        }
        if self.samples == 0 {
            return Err(Exit::Invalid("--samples must be positive".into()));
        }
        Ok(())
    }
}

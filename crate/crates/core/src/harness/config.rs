use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::Theorem;
use crate::constants::DEFAULT_BUDGET;
use crate::model::{Amplitude, Ensemble, NoiseSpec};
use crate::solvers::Program;
use crate::{Error, Result};

fn default_true() -> bool {
    true
}

fn default_ensemble() -> Ensemble {
    Ensemble::Gaussian
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub n: usize,
    pub p: usize,
    #[serde(default = "default_ensemble")]
    pub ensemble: Ensemble,
    #[serde(default = "default_true")]
    pub normalize: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    /// Sparsity levels, one grid row each.
    pub k: Vec<usize>,
    pub amplitude: Amplitude,
}

/// Explicit program parameters; unset ones are derived from the noise regime.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterOverrides {
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub budget: u64,
    pub mc_trials: usize,
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        ConstantsSpec { budget: DEFAULT_BUDGET, mc_trials: 2_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub plotdata: Option<PathBuf>,
    /// Per-trial records, including wall times.
    pub trials: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: MatrixSpec,
    pub signal: SignalSpec,
    pub noise: Vec<NoiseSpec>,
    pub programs: Vec<Program>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub theorems: Vec<Theorem>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub parameters: ParameterOverrides,
    #[serde(default)]
    pub constants: ConstantsSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let MatrixSpec { n, p, .. } = self.matrix;
        if n == 0 || p == 0 {
            return Err(Error::InvalidDimension(format!("n = {n}, p = {p}")));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.signal.k.is_empty() || self.noise.is_empty() || self.programs.is_empty() {
            return Err(Error::InvalidParameter("k grid, noise list and programs must be non-empty".into()));
        }
        if let Some(&k) = self.signal.k.iter().find(|&&k| k > p) {
            return Err(Error::InvalidSparsity { k, p });
        }
        for noise in &self.noise {
            noise.validate()?;
        }
        let ParameterOverrides { lambda, eta, rho } = self.parameters;
        for (name, v) in [("lambda", lambda), ("eta", eta)] {
            if v.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::InvalidParameter(format!("{name} override must be nonnegative")));
            }
        }
        if rho.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("rho override must be positive".into()));
        }
        if self.theorems.contains(&Theorem::P1Coherence) && !self.matrix.normalize {
            return Err(Error::NonUnitColumns);
        }
        Ok(())
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::algorithm::AlgorithmSpec;
use crate::datagen::{OiFamilySpec, SyntheticSpec};
use crate::{Error, Result};

/// Where the datasets of a run come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSource {
    Csv { path: PathBuf },
    Synthetic {
        #[serde(default)]
        spec: SyntheticSpec,
        /// Independent datasets drawn from the spec.
        #[serde(default = "one")]
        datasets: usize,
    },
    OiFamily {
        #[serde(default)]
        spec: OiFamilySpec,
    },
}

fn one() -> usize {
    1
}

impl InputSource {
    pub fn has_truth(&self) -> bool {
        matches!(self, Self::Synthetic { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    N,
    SigmaX2,
    SigmaE2,
    Epsilon,
    XNew,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Datasets drawn per grid point.
    #[serde(default = "default_sweep_datasets")]
    pub datasets: usize,
}

fn default_sweep_datasets() -> usize {
    500
}

/// A complete experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub input: InputSource,
    pub algorithms: Vec<AlgorithmSpec>,
    pub epsilons: Vec<f64>,
    /// Used by approximate-DP algorithms.
    pub delta: f64,
    pub trials: usize,
    pub q: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads; `None` lets the pool decide.
    pub workers: Option<usize>,
    pub strict_csv: bool,
    pub header_timestamp: bool,
    pub sweep: Option<SweepSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            input: InputSource::Synthetic {
                spec: SyntheticSpec::default(),
                datasets: 1,
            },
            algorithms: vec![
                AlgorithmSpec::Ols {},
                AlgorithmSpec::NoisyStats {},
                AlgorithmSpec::DpExpTheilsen { k: None, range: None },
            ],
            epsilons: vec![1.0],
            delta: 2f64.powi(-30),
            trials: 100,
            q: vec![68.0],
            seed: 0,
            out: PathBuf::from("out"),
            workers: None,
            strict_csv: false,
            header_timestamp: true,
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::Config(format!("every epsilon must be finite and > 0, got {:?}", self.epsilons)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must be in (0, 1), got {}", self.delta)));
        }
        if self.q.is_empty() || self.q.iter().any(|q| !(0.0..=100.0).contains(q)) {
            return Err(Error::Config(format!("q values must be in [0, 100], got {:?}", self.q)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        match &self.input {
            InputSource::Synthetic { spec, datasets } => {
                spec.validate()?;
                if *datasets == 0 {
                    return Err(Error::Config("synthetic datasets must be >= 1".into()));
                }
            }
            InputSource::OiFamily { spec } if spec.tracts == 0 => return Err(Error::EmptyFamily),
            _ => {}
        }
        let family = matches!(self.input, InputSource::OiFamily { .. });
        for a in &self.algorithms {
            a.validate()?;
            if matches!(a, AlgorithmSpec::Mos {}) && !family {
                return Err(Error::Config("mos needs an oi_family input".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep grid is empty".into()));
            }
            if sweep.datasets == 0 {
                return Err(Error::Config("sweep datasets must be >= 1".into()));
            }
            if !matches!(self.input, InputSource::Synthetic { .. }) {
                return Err(Error::Config("sweeps need a synthetic input".into()));
            }
        }
        Ok(())
    }
}

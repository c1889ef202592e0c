use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::appell::GeneratingFunction;
use crate::error::{LabError, Result};
use crate::function::TestFunction;
use crate::operator::{OperatorConfig, ScaleSequence, DEFAULT_EPSILON, DEFAULT_QUAD_ORDER};
use crate::smoothness::{LipClass, Theorem};
use crate::weighted::{DEFAULT_GRID_N, DEFAULT_X_MAX};

/// Uniform grid of `points` abscissae on `[0, a]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XGrid {
    pub a: f64,
    pub points: usize,
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points).map(|i| self.a * i as f64 / last).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyOptions {
    #[serde(default = "all_theorems")]
    pub theorems: Vec<Theorem>,
    #[serde(default = "default_lip_classes")]
    pub lip_classes: Vec<LipClass>,
}

fn all_theorems() -> Vec<Theorem> {
    Theorem::ALL.to_vec()
}

fn default_lip_classes() -> Vec<LipClass> {
    [0.5, 1.0]
        .into_iter()
        .map(|alpha| LipClass {
            alpha,
            alpha1: 1.0,
            alpha2: 1.0,
            m_lip: None,
        })
        .collect()
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            theorems: all_theorems(),
            lip_classes: default_lip_classes(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedOptions {
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

fn default_x_max() -> f64 {
    DEFAULT_X_MAX
}

fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}

impl Default for WeightedOptions {
    fn default() -> Self {
        Self {
            x_max: DEFAULT_X_MAX,
            grid_n: DEFAULT_GRID_N,
        }
    }
}

/// One experiment file. Every optional field is filled with its default on
/// parse, so serialising a parsed config echoes the effective settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub gf: GeneratingFunction,
    pub scale: ScaleSequence,
    pub n_list: Vec<u64>,
    pub x_grid: XGrid,
    pub functions: Vec<TestFunction>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    #[serde(default)]
    pub allow_invalid_scale: bool,
    #[serde(default)]
    pub certify: CertifyOptions,
    #[serde(default)]
    pub weighted: WeightedOptions,
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_quad_order() -> usize {
    DEFAULT_QUAD_ORDER
}

impl ExperimentConfig {
    /// Parse and validate. Syntax errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if self.n_list.is_empty() {
            return bad("n_list: at least one n required".into());
        }
        if self.n_list[0] == 0 {
            return bad("n_list: n must be >= 1".into());
        }
        if let Some(i) = self.n_list.windows(2).position(|w| w[0] >= w[1]) {
            return bad(format!(
                "n_list: not strictly increasing at index {} ({} then {})",
                i + 1,
                self.n_list[i],
                self.n_list[i + 1]
            ));
        }
        if !(self.x_grid.a > 0.0 && self.x_grid.a.is_finite()) {
            return bad(format!("x_grid.a = {} must be positive", self.x_grid.a));
        }
        if self.x_grid.points < 2 {
            return bad(format!(
                "x_grid.points = {} must be >= 2",
                self.x_grid.points
            ));
        }
        if self.functions.is_empty() {
            return bad("functions: at least one test function required".into());
        }
        for (i, f) in self.functions.iter().enumerate() {
            f.validate()
                .map_err(|e| LabError::Config(format!("functions[{i}]: {e}")))?;
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} must lie in (0, 1)", self.epsilon));
        }
        if self.quad_order < 2 {
            return bad(format!("quad_order = {} must be >= 2", self.quad_order));
        }
        for (i, c) in self.certify.lip_classes.iter().enumerate() {
            c.validate()
                .map_err(|e| LabError::Config(format!("certify.lip_classes[{i}]: {e}")))?;
        }
        if !(self.weighted.x_max >= 1.0) || self.weighted.grid_n == 0 {
            return bad("weighted: x_max must be >= 1 and grid_n >= 1".into());
        }
        Ok(())
    }

    pub fn operator_config(&self, n: u64) -> OperatorConfig {
        OperatorConfig {
            gf: self.gf.clone(),
            n,
            scale: self.scale,
            epsilon: self.epsilon,
            quad_order: self.quad_order,
            allow_invalid_scale: self.allow_invalid_scale,
        }
    }

    pub fn operator_configs(&self) -> Vec<OperatorConfig> {
        self.n_list
            .iter()
            .map(|&n| self.operator_config(n))
            .collect()
    }
}

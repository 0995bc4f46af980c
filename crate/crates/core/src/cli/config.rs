use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::systems::SystemConfig;
use crate::{Error, Result};

/// Which recursion a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Grid over the full state space.
    Full,
    /// Grid over the invariants of the system's symmetry group.
    Reduced,
    /// Grid over the unit sphere for costs equivariant under dilations.
    Equivariant,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Reduced => "reduced",
            Mode::Equivariant => "equivariant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub nodes_per_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            samples: 1000,
            tolerance: 1e-9,
        }
    }
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// A run configuration file.
///
/// `workers` and `out_dir` only affect where and how fast a run happens, so
/// they are left out of the snapshot stored in a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default = "one", skip_serializing)]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out", skip_serializing)]
    pub out_dir: PathBuf,
    pub system: SystemConfig,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default)]
    pub check: CheckConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.apply_quadrature();
        config.validate()?;
        Ok(config)
    }

    /// Reads a configuration; a relative `out_dir` is taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if config.out_dir.is_relative() {
            if let Some(parent) = path.parent() {
                config.out_dir = parent.join(&config.out_dir);
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn apply_quadrature(&mut self) {
        if let Some(q) = &self.quadrature {
            match &mut self.system {
                SystemConfig::DubinsPair(c) => c.nodes_per_dim = q.nodes_per_dim,
                SystemConfig::Rotor2d(c) => c.nodes_per_dim = q.nodes_per_dim,
                _ => {}
            }
        }
    }

    /// Dimension of the grid this run's mode expects.
    pub fn expected_grid_dim(&self) -> Result<usize> {
        let (n, r) = match &self.system {
            SystemConfig::DubinsPair(_) => (6, 3),
            SystemConfig::MriFingerprint(_) => (6, 1),
            SystemConfig::Rotor2d(_) => (2, 1),
            SystemConfig::Lqr(c) | SystemConfig::L1(c) => (c.n, c.n - 1),
        };
        let linear = matches!(self.system, SystemConfig::Lqr(_) | SystemConfig::L1(_));
        match (self.mode, linear) {
            (Mode::Full, _) => Ok(n),
            (Mode::Reduced, false) => Ok(n - r),
            (Mode::Equivariant, true) => Ok(n - r),
            (mode, _) => Err(Error::Config(format!(
                "mode `{}` is not available for system `{}`",
                mode.as_str(),
                self.system.name()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let SystemConfig::Lqr(c) | SystemConfig::L1(c) = &self.system {
            if !(1..=2).contains(&c.n) {
                return Err(Error::Config(format!("n must be 1 or 2, got {}", c.n)));
            }
        }
        let expected = self.expected_grid_dim()?;
        if self.grid.dim() != expected {
            return Err(Error::Config(format!(
                "{} mode for `{}` needs a {expected}-axis grid, got {}",
                self.mode.as_str(),
                self.system.name(),
                self.grid.dim()
            )));
        }
        if !(self.check.tolerance >= 0.0) {
            return Err(Error::Config("check tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

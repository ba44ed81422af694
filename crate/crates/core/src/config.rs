//! TOML run configuration. Every section is optional except where a
//! subcommand needs it; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Disk, Region};
use crate::mc::{Functional, MIN_REPLICATIONS};
use crate::pointproc::{PointModel, PointSource};
use crate::tess::{BuildOptions, TessSpec};
use crate::verify::{CheckKind, SuiteConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetShape {
    #[default]
    Disk,
    /// Axis-parallel square of side `target_radius`.
    Box,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "one")]
    pub target_radius: f64,
    #[serde(default)]
    pub target_shape: TargetShape,
    #[serde(default)]
    pub tessellation: Option<TessSpec>,
    #[serde(default)]
    pub build: BuildOptions,
    #[serde(default)]
    pub estimate: EstimateConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateConfig {
    pub functionals: Vec<Functional>,
    pub alphas: Vec<f64>,
    pub n: usize,
    /// Tail thresholds, used by `tail`.
    pub thresholds: Vec<f64>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            functionals: vec![Functional::Length, Functional::W, Functional::V],
            alphas: vec![0.0, 0.5, 1.0, 2.0],
            n: 1000,
            thresholds: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub checks: Vec<CheckKind>,
    pub lambdas: Vec<f64>,
    pub realizations: usize,
    pub jm_realizations: usize,
    pub jm_grid_step: f64,
    pub probes: usize,
    /// Interchange files to check instead of running the suite.
    pub inputs: Vec<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let s = SuiteConfig::default();
        VerifyConfig {
            checks: CheckKind::ALL.to_vec(),
            lambdas: s.lambdas,
            realizations: s.realizations,
            jm_realizations: s.jm_realizations,
            jm_grid_step: s.jm_grid_step,
            probes: s.probes,
            inputs: Vec::new(),
        }
    }
}

impl VerifyConfig {
    pub fn suite(&self, seed: u64) -> SuiteConfig {
        SuiteConfig {
            lambdas: self.lambdas.clone(),
            realizations: self.realizations,
            jm_realizations: self.jm_realizations,
            jm_grid_step: self.jm_grid_step,
            probes: self.probes,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub lambda: f64,
    pub r: f64,
    pub n: usize,
    /// Significance level below which the test is reported as failed.
    pub level: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig { lambda: 1.0, r: 2.0, n: 2000, level: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub k_max: usize,
    /// Replications of the empirical cell-count moment; 0 skips it.
    pub empirical_n: usize,
    /// Exponent above which an empirical term is counted as capped.
    pub cap: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { alpha: 1.0, lambda: 1.0, k_max: 30, empirical_n: 10_000, cap: 700.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub source: PointSource,
    pub n_values: Vec<f64>,
    pub reps: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            source: PointSource::new(PointModel::Poisson { lambda: 1.0 }),
            n_values: vec![1.0, 2.0, 4.0],
            reps: 1000,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical TOML form; parsing it gives back an equal config.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical form, ignoring the output directory.
    pub fn hash(&self) -> Result<String> {
        let c = RunConfig { out: PathBuf::new(), ..self.clone() };
        Ok(hex::encode(Sha256::digest(c.to_toml()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.target_radius > 0.0 && self.target_radius.is_finite()) {
            return bad("target_radius must be positive");
        }
        if let Some(spec) = &self.tessellation {
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if !(self.build.max_window_factor >= 1.0 && self.build.grid_step > 0.0) {
            return bad("build.max_window_factor must be >= 1 and build.grid_step > 0");
        }
        let e = &self.estimate;
        if e.functionals.is_empty() {
            return bad("estimate.functionals is empty");
        }
        if e.n < MIN_REPLICATIONS {
            return bad("estimate.n must be at least 100");
        }
        if e.alphas.iter().chain(&e.thresholds).any(|x| !x.is_finite()) {
            return bad("estimate.alphas and estimate.thresholds must be finite");
        }
        if self.verify.lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return bad("verify.lambdas must be positive");
        }
        if !(self.scaling.r > 0.0 && self.scaling.lambda > 0.0 && self.scaling.n > 0) {
            return bad("scaling needs r > 0, lambda > 0 and n > 0");
        }
        self.probe.source.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn target(&self) -> Region {
        match self.target_shape {
            TargetShape::Disk => Region::Disk(Disk::centered(self.target_radius)),
            TargetShape::Box => Region::Box(BoxRegion::centered(self.target_radius)),
        }
    }

    pub fn spec(&self) -> Result<&TessSpec> {
        self.tessellation.as_ref().ok_or_else(|| Error::Config("missing [tessellation] section".into()))
    }
}

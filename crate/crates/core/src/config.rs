//! Run configuration file.
//!
//! A run config is a JSON document naming the zone file and every knob of both
//! processes. Unknown keys are rejected so typos surface as errors. Relative
//! paths are resolved against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certify::{Context, DecisionThresholds, ProcessConfig, StopRule};
use crate::mgp::{omega_from_zone, FitConfig, KernelParams, LocalityConfig};
use crate::netsim::{Simulator, ZoneConfig};
use crate::sampler::{exponential_covariance, SamplerConfig, ScenarioSampler, DEFAULT_MAX_REJECTIONS};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceSpec {
    /// `Σ_ij = scale² · correlation^|i-j|`
    Exponential {
        scale: f64,
        correlation: f64,
    },
    Matrix(Vec<Vec<f64>>),
}

impl Default for CovarianceSpec {
    fn default() -> Self {
        CovarianceSpec::Exponential { scale: 0.5, correlation: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSection {
    pub covariance: CovarianceSpec,
    pub max_rejections: u64,
}

impl Default for SamplerSection {
    fn default() -> Self {
        SamplerSection { covariance: CovarianceSpec::default(), max_rejections: DEFAULT_MAX_REJECTIONS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MgpSection {
    pub kernel: KernelParams,
    pub locality: LocalityConfig,
    pub refit_period: usize,
    pub fit: FitConfig,
}

impl Default for MgpSection {
    fn default() -> Self {
        MgpSection {
            kernel: KernelParams::default(),
            locality: LocalityConfig::default(),
            refit_period: 10,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub zone_path: PathBuf,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub mgp: MgpSection,
    #[serde(default)]
    pub thresholds: DecisionThresholds,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_batch")]
    pub m_batch: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_stop")]
    pub stop_rule: StopRule,
    #[serde(default = "default_accuracy")]
    pub cdf_accuracy: f64,
    #[serde(default)]
    pub record_timing: bool,
    /// Known `p_safe` of the zone, used only for reporting.
    #[serde(default)]
    pub reference_p_safe: Option<f64>,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_alpha() -> f64 {
    0.05
}
fn default_budget() -> u64 {
    100_000
}
fn default_batch() -> usize {
    100
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_stop() -> StopRule {
    StopRule::Budget
}
fn default_accuracy() -> f64 {
    crate::mvncdf::DEFAULT_ACCURACY
}

impl RunConfig {
    pub fn new(zone_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            zone_path: zone_path.into(),
            sampler: SamplerSection::default(),
            mgp: MgpSection::default(),
            thresholds: DecisionThresholds::default(),
            alpha: default_alpha(),
            budget: default_budget(),
            m_batch: default_batch(),
            seed: 0,
            output_dir: default_output(),
            stop_rule: default_stop(),
            cdf_accuracy: default_accuracy(),
            record_timing: false,
            reference_p_safe: None,
            base_dir: PathBuf::new(),
        }
    }

    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|source| Error::Json { context: "run config".into(), source })?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base).map_err(|e| match e {
            Error::Json { source, .. } => Error::Json { context: path.display().to_string(), source },
            other => other,
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn zone_file(&self) -> PathBuf {
        self.resolve(&self.zone_path)
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        self.output_dir =
            if dir.is_relative() { std::env::current_dir().map(|c| c.join(&dir)).unwrap_or(dir) } else { dir };
    }

    pub fn process_config(&self) -> ProcessConfig {
        ProcessConfig {
            alpha: self.alpha,
            budget: self.budget,
            m_batch: self.m_batch,
            thresholds: self.thresholds,
            locality: self.mgp.locality,
            init_params: self.mgp.kernel,
            refit_period: self.mgp.refit_period,
            fit: self.mgp.fit.clone(),
            cdf_accuracy: self.cdf_accuracy,
            stop: self.stop_rule,
            record_timing: self.record_timing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.process_config().validate()?;
        if self.sampler.max_rejections == 0 {
            return Err(Error::invalid("sampler.max_rejections", "must be positive"));
        }
        if let Some(p) = self.reference_p_safe {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("reference_p_safe", "must be in [0, 1]"));
            }
        }
        let f = &self.mgp.fit;
        if f.subsample_cap < crate::mgp::MIN_FIT_POINTS {
            return Err(Error::invalid("mgp.fit.subsample_cap", "too small"));
        }
        for (name, (lo, hi)) in [
            ("sigma0_sq", f.bounds.sigma0_sq),
            ("sigmaf_sq", f.bounds.sigmaf_sq),
            ("length_scale", f.bounds.length_scale),
        ] {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::invalid(format!("mgp.fit.bounds.{name}"), "need 0 < low <= high"));
            }
        }
        Ok(())
    }

    pub fn sampler_config(&self, num_nodes: usize) -> Result<SamplerConfig> {
        let node_covariance = match &self.sampler.covariance {
            CovarianceSpec::Exponential { scale, correlation } => {
                exponential_covariance(num_nodes, *scale, *correlation)
            }
            CovarianceSpec::Matrix(rows) => {
                if rows.len() != num_nodes || rows.iter().any(|r| r.len() != num_nodes) {
                    return Err(Error::invalid(
                        "sampler.covariance",
                        format!("matrix must be {num_nodes}x{num_nodes} to match the zone"),
                    ));
                }
                nalgebra::DMatrix::from_fn(num_nodes, num_nodes, |i, j| rows[i][j])
            }
        };
        Ok(SamplerConfig { node_covariance, seed: self.seed, max_rejections: self.sampler.max_rejections })
    }

    /// Loads the zone, builds its curtailment history and `Ω`.
    pub fn build_context(&self) -> Result<Context> {
        let zone = ZoneConfig::load(self.zone_file())?;
        self.context_for_zone(zone)
    }

    pub fn context_for_zone(&self, zone: ZoneConfig) -> Result<Context> {
        let sampler = ScenarioSampler::new(&self.sampler_config(zone.num_nodes())?)?;
        let omega = omega_from_zone(&zone);
        let simulator = Simulator::new(zone, &sampler)?;
        Context::new(simulator, sampler, omega, self.seed)
    }
}

//! Renewable-injection scenarios.
//!
//! A scenario is a vector of relative available injections, one per node, drawn
//! from `N(0, Σ_nodes)` conditioned on the unit hypercube. The conditioning is done
//! by plain rejection, which is exact.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{Domain, SeedSpace};
use crate::{Error, Result};

/// One draw from the scenario distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Draw index, unique within a run. Also identifies the point for the
    /// kernel's noise term.
    pub id: u64,
    pub values: Vec<f64>,
}

impl Scenario {
    pub fn new(id: u64, values: Vec<f64>) -> Self {
        Scenario { id, values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Total relative injection over all nodes.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn squared_distance(&self, other: &Scenario) -> f64 {
        squared_distance(&self.values, &other.values)
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Node covariance plus the knobs of the rejection sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub node_covariance: DMatrix<f64>,
    pub seed: u64,
    pub max_rejections: u64,
}

pub const DEFAULT_MAX_REJECTIONS: u64 = 1_000_000;

impl SamplerConfig {
    /// `Σ_ij = scale² · correlation^|i-j|`.
    pub fn exponential(num_nodes: usize, scale: f64, correlation: f64, seed: u64) -> Self {
        SamplerConfig {
            node_covariance: exponential_covariance(num_nodes, scale, correlation),
            seed,
            max_rejections: DEFAULT_MAX_REJECTIONS,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.node_covariance.nrows()
    }
}

pub fn exponential_covariance(n: usize, scale: f64, correlation: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| scale * scale * correlation.powi((i as i32 - j as i32).abs()))
}

/// Validated sampler holding the Cholesky factor of `Σ_nodes`.
#[derive(Debug, Clone)]
pub struct ScenarioSampler {
    chol: DMatrix<f64>,
    seeds: SeedSpace,
    max_rejections: u64,
}

impl ScenarioSampler {
    pub fn new(cfg: &SamplerConfig) -> Result<Self> {
        let cov = &cfg.node_covariance;
        let n = cov.nrows();
        if n == 0 || cov.ncols() != n {
            return Err(Error::invalid(
                "node_covariance",
                format!("must be a non-empty square matrix, got {}x{}", n, cov.ncols()),
            ));
        }
        if cfg.max_rejections == 0 {
            return Err(Error::invalid("max_rejections", "must be positive"));
        }
        for i in 0..n {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid("node_covariance", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let chol =
            cov.clone().cholesky().ok_or_else(|| Error::invalid("node_covariance", "not positive definite"))?.l();
        if (0..n).any(|i| !(chol[(i, i)] > 0.0)) {
            return Err(Error::invalid("node_covariance", "Cholesky diagonal is not strictly positive"));
        }
        Ok(ScenarioSampler { chol, seeds: SeedSpace::new(cfg.seed), max_rejections: cfg.max_rejections })
    }

    /// Same covariance, different seed namespace.
    pub fn with_seeds(&self, seeds: SeedSpace) -> Self {
        ScenarioSampler { seeds, ..self.clone() }
    }

    pub fn num_nodes(&self) -> usize {
        self.chol.nrows()
    }

    pub fn seeds(&self) -> SeedSpace {
        self.seeds
    }

    /// The scenario with draw index `id`; a pure function of `(seed, id)`.
    pub fn sample(&self, id: u64) -> Result<Scenario> {
        let mut rng = self.seeds.stream(Domain::Scenario, id);
        self.sample_with(&mut rng, id)
    }

    /// Rejection sampling from an explicit stream.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, id: u64) -> Result<Scenario> {
        let n = self.num_nodes();
        let mut z = DVector::<f64>::zeros(n);
        let mut x = DVector::<f64>::zeros(n);
        for _ in 0..self.max_rejections {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            self.chol.mul_to(&z, &mut x);
            if x.iter().all(|&v| (0.0..=1.0).contains(&v)) {
                return Ok(Scenario::new(id, x.as_slice().to_vec()));
            }
        }
        Err(Error::RejectionBudgetExceeded { attempts: self.max_rejections })
    }

    /// Scenarios `base_id .. base_id + count`.
    pub fn sample_batch(&self, count: usize, base_id: u64) -> Result<Vec<Scenario>> {
        if count == 0 {
            return Err(Error::invalid("count", "batch size must be at least 1"));
        }
        (0..count as u64).into_par_iter().map(|k| self.sample(base_id + k)).collect()
    }
}

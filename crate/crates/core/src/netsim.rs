//! Fictitious zone simulator.
//!
//! Flows are a PTDF product perturbed by per-node white noise and scaled by a
//! curtailment coefficient `β`. `β` is drawn from a history of minimal curtailments
//! observed on scenarios with a similar total injection, which stands in for the
//! real closed-loop controller. Flows are relative to the line limits throughout.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::rng::{Domain, SeedSpace};
use crate::sampler::{Scenario, ScenarioSampler};
use crate::{Error, Result};

/// Margin that turns the closed-form curtailment into a strict inequality.
pub const CURTAILMENT_MARGIN: f64 = 1e-3;

/// Zone description as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneConfig {
    /// `L x N`, already normalised by the line limits.
    pub ptdf: Vec<Vec<f64>>,
    pub noise_sigma: f64,
    pub history_size: usize,
    pub eta: f64,
    pub seed: u64,
}

impl ZoneConfig {
    pub fn num_lines(&self) -> usize {
        self.ptdf.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.ptdf.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_nodes();
        if self.ptdf.is_empty() || n == 0 {
            return Err(Error::invalid("ptdf", "must have at least one line and one node"));
        }
        if let Some(row) = self.ptdf.iter().position(|r| r.len() != n) {
            return Err(Error::invalid("ptdf", format!("row {row} has a different length")));
        }
        if self.ptdf.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("ptdf", "entries must be finite"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma", "must be finite and nonnegative"));
        }
        if self.history_size == 0 {
            return Err(Error::invalid("history_size", "must be at least 1"));
        }
        if !(self.eta > 0.0) {
            return Err(Error::invalid("eta", "must be positive"));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let zone: ZoneConfig = serde_json::from_str(&text)
            .map_err(|source| Error::Json { context: path.display().to_string(), source })?;
        zone.validate()?;
        Ok(zone)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)
            .map_err(|source| Error::Json { context: path.display().to_string(), source })?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    fn check_dim(&self, x: &Scenario) -> Result<()> {
        if x.dim() != self.num_nodes() {
            return Err(Error::DimensionMismatch { expected: self.num_nodes(), found: x.dim() });
        }
        Ok(())
    }
}

/// Parameters of a randomly generated zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneSpec {
    pub num_lines: usize,
    pub num_nodes: usize,
    pub ptdf_low: f64,
    pub ptdf_high: f64,
    pub noise_sigma: f64,
    pub history_size: usize,
    pub eta: f64,
}

impl Default for ZoneSpec {
    fn default() -> Self {
        ZoneSpec {
            num_lines: 5,
            num_nodes: 10,
            ptdf_low: 0.05,
            ptdf_high: 0.24,
            noise_sigma: 0.01,
            history_size: 500,
            eta: 0.25,
        }
    }
}

/// Seed of the zone shipped as `zones/reference_5x10.json`.
pub const REFERENCE_ZONE_SEED: u64 = 20_240_610;

/// Draws PTDF entries uniformly in `[ptdf_low, ptdf_high)`.
pub fn make_zone(spec: &ZoneSpec, seed: u64) -> ZoneConfig {
    let mut rng = SeedSpace::new(seed).stream(Domain::Zone, 0);
    let dist = Uniform::new(spec.ptdf_low, spec.ptdf_high).expect("ptdf range");
    let ptdf = (0..spec.num_lines).map(|_| (0..spec.num_nodes).map(|_| dist.sample(&mut rng)).collect()).collect();
    ZoneConfig { ptdf, noise_sigma: spec.noise_sigma, history_size: spec.history_size, eta: spec.eta, seed }
}

/// `r_l = Σ_n (PTDF_ln + ε_n) x_n` with one fresh `ε_n ~ N(0, σ²)` per node.
pub fn raw_flows<R: Rng + ?Sized>(zone: &ZoneConfig, x: &Scenario, rng: &mut R) -> Result<Vec<f64>> {
    zone.check_dim(x)?;
    let noise: Vec<f64> = if zone.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, zone.noise_sigma).expect("noise sigma");
        (0..zone.num_nodes()).map(|_| normal.sample(rng)).collect()
    } else {
        vec![0.0; zone.num_nodes()]
    };
    Ok(zone
        .ptdf
        .iter()
        .map(|row| row.iter().zip(&noise).zip(&x.values).map(|((p, e), xn)| (p + e) * xn).sum())
        .collect())
}

/// Largest `β ≤ 1` keeping every line strictly below its limit.
pub fn minimal_curtailment(raw: &[f64]) -> f64 {
    let peak = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak > 0.0 {
        ((1.0 - CURTAILMENT_MARGIN) / peak).min(1.0)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub total_injection: f64,
    pub beta: f64,
}

/// Past curtailment decisions indexed by total injection.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurtailmentHistory {
    pub entries: Vec<HistoryEntry>,
}

impl CurtailmentHistory {
    pub fn new(entries: Vec<HistoryEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| !(0.0..=1.0).contains(&e.beta)) {
            return Err(Error::invalid("beta", format!("{} outside [0, 1]", e.beta)));
        }
        Ok(CurtailmentHistory { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Cand(x)`: betas of entries whose total is within `eta` of `x`'s total.
    pub fn candidates(&self, x: &Scenario, eta: f64) -> Vec<f64> {
        let total = x.total();
        self.entries.iter().filter(|e| (total - e.total_injection).abs() < eta).map(|e| e.beta).collect()
    }
}

/// Draws `history_size` scenarios from the zone's own seed namespace and records
/// their minimal curtailment.
pub fn build_history(zone: &ZoneConfig, sampler: &ScenarioSampler) -> Result<CurtailmentHistory> {
    zone.validate()?;
    let seeds = SeedSpace::new(zone.seed);
    let sampler = sampler.with_seeds(seeds);
    let entries = (0..zone.history_size as u64)
        .map(|j| {
            let x = sampler.sample(j)?;
            let mut rng = seeds.stream(Domain::History, j);
            let raw = raw_flows(zone, &x, &mut rng)?;
            Ok(HistoryEntry { total_injection: x.total(), beta: minimal_curtailment(&raw) })
        })
        .collect::<Result<Vec<_>>>()?;
    CurtailmentHistory::new(entries)
}

/// Uniform pick from `Cand(x)`, or 1 when no past scenario is similar enough.
pub fn select_beta<R: Rng + ?Sized>(history: &CurtailmentHistory, x: &Scenario, eta: f64, rng: &mut R) -> f64 {
    let cand = history.candidates(x, eta);
    if cand.is_empty() {
        1.0
    } else {
        cand[rng.random_range(0..cand.len())]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResponse {
    pub flows: Vec<f64>,
    pub beta_used: f64,
}

/// Safe iff no line exceeds its limit.
pub fn classify(flows: &[f64]) -> bool {
    flows.iter().all(|&y| y <= 1.0)
}

/// The black box: zone plus its curtailment history.
#[derive(Debug, Clone)]
pub struct Simulator {
    zone: ZoneConfig,
    history: CurtailmentHistory,
}

impl Simulator {
    pub fn new(zone: ZoneConfig, sampler: &ScenarioSampler) -> Result<Self> {
        if sampler.num_nodes() != zone.num_nodes() {
            return Err(Error::DimensionMismatch { expected: zone.num_nodes(), found: sampler.num_nodes() });
        }
        let history = build_history(&zone, sampler)?;
        Ok(Simulator { zone, history })
    }

    pub fn from_parts(zone: ZoneConfig, history: CurtailmentHistory) -> Result<Self> {
        zone.validate()?;
        Ok(Simulator { zone, history })
    }

    pub fn zone(&self) -> &ZoneConfig {
        &self.zone
    }

    pub fn history(&self) -> &CurtailmentHistory {
        &self.history
    }

    /// One non-deterministic simulation: fresh `β` and fresh noise.
    pub fn simulate_with<R: Rng + ?Sized>(&self, x: &Scenario, rng: &mut R) -> Result<FlowResponse> {
        self.zone.check_dim(x)?;
        let beta = select_beta(&self.history, x, self.zone.eta, rng);
        let flows = raw_flows(&self.zone, x, rng)?.into_iter().map(|r| beta * r).collect();
        Ok(FlowResponse { flows, beta_used: beta })
    }

    /// Simulation of scenario `x` on its own stream in `seeds`.
    pub fn simulate(&self, x: &Scenario, seeds: SeedSpace) -> Result<FlowResponse> {
        let mut rng = seeds.stream(Domain::Simulation, x.id);
        self.simulate_with(x, &mut rng)
    }
}

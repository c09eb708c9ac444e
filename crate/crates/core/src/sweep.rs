//! Simulation-count sweep for the brute-force process on a synthetic coin.
//!
//! Each certification flips a `B(p)` coin until the classic interval at level
//! `alpha` has relative half-width at most the target precision.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::certify::wilson_from_mean;
use crate::rng::{stream, Domain};
use crate::{Error, Result};

pub const SWEEP_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p_values: Vec<f64>,
    pub precisions: Vec<f64>,
    pub repeats: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Hard cap on flips per certification.
    pub max_simulations: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            p_values: vec![0.5, 0.75, 0.95],
            precisions: vec![0.35, 0.10, 0.05],
            repeats: 100,
            alpha: SWEEP_ALPHA,
            seed: 0,
            max_simulations: 100_000_000,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_values.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid("p_values", "must lie in (0, 1)"));
        }
        if self.precisions.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::invalid("precisions", "must lie in (0, 1]"));
        }
        if self.repeats == 0 {
            return Err(Error::invalid("repeats", "must be at least 1"));
        }
        crate::certify::interval::check_alpha(self.alpha)
    }
}

/// Number of flips one certification needs to reach `precision`.
pub fn simulations_to_precision<R: Rng + ?Sized>(p: f64, precision: f64, alpha: f64, cap: u64, rng: &mut R) -> u64 {
    let mut safe = 0u64;
    let mut m = 0u64;
    while m < cap {
        m += 1;
        if rng.random::<f64>() < p {
            safe += 1;
        }
        let ci = wilson_from_mean(safe as f64 / m as f64, m as f64, alpha);
        if ci.relative_half_width() <= precision + 1e-12 {
            break;
        }
    }
    m
}

/// Mean simulation counts, indexed `[precision][p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub p_values: Vec<f64>,
    pub precisions: Vec<f64>,
    pub mean_simulations: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn get(&self, p_index: usize, precision_index: usize) -> f64 {
        self.mean_simulations[precision_index][p_index]
    }

    /// `precision,Probability_0_5,...` with precision in percent.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["precision".to_string()];
        header.extend(self.p_values.iter().map(|p| format!("Probability_{}", p.to_string().replace('.', "_"))));
        w.write_record(&header)?;
        for (e, row) in self.precisions.iter().zip(&self.mean_simulations) {
            let mut rec = vec![format!("{}", e * 100.0)];
            rec.extend(row.iter().map(|v| format!("{v:.2}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

pub fn sweep_precision(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let np = cfg.p_values.len();
    let mean_simulations = cfg
        .precisions
        .iter()
        .enumerate()
        .map(|(ei, &e)| {
            cfg.p_values
                .iter()
                .enumerate()
                .map(|(pi, &p)| {
                    let total: u64 = (0..cfg.repeats)
                        .into_par_iter()
                        .map(|r| {
                            let id = ((ei * np + pi) as u64) << 32 | r as u64;
                            let mut rng = stream(cfg.seed, Domain::Coin, id);
                            simulations_to_precision(p, e, cfg.alpha, cfg.max_simulations, &mut rng)
                        })
                        .sum();
                    total as f64 / cfg.repeats as f64
                })
                .collect()
        })
        .collect();
    Ok(SweepTable { p_values: cfg.p_values.clone(), precisions: cfg.precisions.clone(), mean_simulations })
}

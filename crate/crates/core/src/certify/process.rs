//! Brute-force and proxy-based certification loops.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::{check_alpha, wilson_from_mean};
use super::{
    draw_prediction, uncertainty_interval, CltAccumulator, ConfidenceInterval, DecisionThresholds, Estimator,
    IterationLog, IterationRow, OutcomeRecord,
};
use crate::mgp::{
    fit_hyperparameters, local_subset, posterior, FitConfig, KernelParams, LocalityConfig, OutputCovariance,
    TrainingSet,
};
use crate::mvncdf::{prediction_entropy, safe_probability, RectangleProbQuery};
use crate::netsim::{classify, Simulator};
use crate::rng::{Domain, SeedSpace};
use crate::sampler::{Scenario, ScenarioSampler};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Run until the simulation budget is spent.
    Budget,
    /// Stop as soon as the interval is at most this long (budget still caps).
    IntervalWidth(f64),
}

impl StopRule {
    fn satisfied(&self, ci: &ConfidenceInterval) -> bool {
        match *self {
            StopRule::Budget => false,
            StopRule::IntervalWidth(target) => ci.length() <= target,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessConfig {
    pub alpha: f64,
    pub budget: u64,
    pub m_batch: usize,
    pub thresholds: DecisionThresholds,
    pub locality: LocalityConfig,
    pub init_params: KernelParams,
    /// Hyperparameters are refitted after every `refit_period` batches.
    pub refit_period: usize,
    pub fit: FitConfig,
    pub cdf_accuracy: f64,
    pub stop: StopRule,
    pub record_timing: bool,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig {
            alpha: 0.05,
            budget: 100_000,
            m_batch: 100,
            thresholds: DecisionThresholds::default(),
            locality: LocalityConfig::default(),
            init_params: KernelParams::default(),
            refit_period: 10,
            fit: FitConfig::default(),
            cdf_accuracy: crate::mvncdf::DEFAULT_ACCURACY,
            stop: StopRule::Budget,
            record_timing: false,
        }
    }
}

impl ProcessConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.budget == 0 {
            return Err(Error::invalid("budget", "must be at least 1"));
        }
        if self.m_batch == 0 {
            return Err(Error::invalid("m_batch", "must be at least 1"));
        }
        if self.refit_period == 0 {
            return Err(Error::invalid("refit_period", "must be at least 1"));
        }
        if !(self.cdf_accuracy > 0.0) {
            return Err(Error::invalid("cdf_accuracy", "must be positive"));
        }
        if let StopRule::IntervalWidth(w) = self.stop {
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::invalid("stop_rule", "interval width target must be in (0, 1]"));
            }
        }
        self.thresholds.validate()?;
        self.locality.validate()?;
        self.init_params.validate()
    }
}

/// Everything both processes share: the black box, the scenario distribution,
/// `Ω` and the root seed.
#[derive(Debug, Clone)]
pub struct Context {
    pub simulator: Simulator,
    pub sampler: ScenarioSampler,
    pub omega: OutputCovariance,
    pub seeds: SeedSpace,
}

const BRUTE_TAG: u64 = 1;
const PROXY_TAG: u64 = 2;

impl Context {
    pub fn new(simulator: Simulator, sampler: ScenarioSampler, omega: OutputCovariance, seed: u64) -> Result<Self> {
        if omega.dim() != simulator.zone().num_lines() {
            return Err(Error::DimensionMismatch { expected: simulator.zone().num_lines(), found: omega.dim() });
        }
        Ok(Context { simulator, sampler, omega, seeds: SeedSpace::new(seed) })
    }

    fn process_seeds(&self, tag: u64) -> (SeedSpace, ScenarioSampler) {
        let seeds = self.seeds.fork(tag);
        (seeds, self.sampler.with_seeds(seeds))
    }
}

#[derive(Debug, Clone)]
pub struct ProcessOutcome {
    pub interval: ConfidenceInterval,
    pub log: IterationLog,
    pub records: Vec<OutcomeRecord>,
    pub iterations: u64,
    pub simulations: u64,
    /// Kernel parameters in force at the end (proxy process only).
    pub final_params: Option<KernelParams>,
}

const BRUTE_CHUNK: usize = 1024;

/// Simulates every drawn scenario until the stop rule fires.
pub fn run_brute_force(ctx: &Context, cfg: &ProcessConfig) -> Result<ProcessOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let (seeds, sampler) = ctx.process_seeds(BRUTE_TAG);
    let mut log = IterationLog::default();
    let mut records = Vec::new();
    let mut safe = 0u64;
    let mut interval = ConfidenceInterval::vacuous(cfg.alpha, Estimator::Classic);
    let mut next_id = 0u64;
    'outer: while (records.len() as u64) < cfg.budget {
        let chunk = BRUTE_CHUNK.min((cfg.budget - records.len() as u64) as usize);
        let outcomes = (next_id..next_id + chunk as u64)
            .into_par_iter()
            .map(|id| {
                let x = sampler.sample(id)?;
                let y = ctx.simulator.simulate(&x, seeds)?;
                Ok(classify(&y.flows))
            })
            .collect::<Result<Vec<bool>>>()?;
        for z in outcomes {
            let id = next_id;
            next_id += 1;
            records.push(OutcomeRecord::simulated(z, id));
            safe += u64::from(z);
            let m = records.len() as u64;
            interval = wilson_from_mean(safe as f64 / m as f64, m as f64, cfg.alpha);
            log.rows.push(IterationRow {
                scenario_id: id,
                p_pred: None,
                sigma_star: None,
                entropy: None,
                simulated: true,
                p_min: interval.p_min,
                p_max: interval.p_max,
                n_sims: m,
                elapsed_s: cfg.record_timing.then(|| start.elapsed().as_secs_f64()),
            });
            if cfg.stop.satisfied(&interval) {
                break 'outer;
            }
        }
    }
    let n = records.len() as u64;
    Ok(ProcessOutcome { interval, log, records, iterations: n, simulations: n, final_params: None })
}

struct Assessment {
    p: f64,
    sigma_star: f64,
    record: Option<OutcomeRecord>,
    flows: Option<Vec<f64>>,
}

fn assess(
    ctx: &Context,
    seeds: SeedSpace,
    train: &TrainingSet,
    params: &KernelParams,
    cfg: &ProcessConfig,
    x: &Scenario,
) -> Result<Assessment> {
    let local = local_subset(train, x, &cfg.locality);
    let post = posterior(&local, x, params, &ctx.omega)?;
    let query = RectangleProbQuery::from_posterior(&post);
    let p = safe_probability(&query, cfg.cdf_accuracy, &mut seeds.stream(Domain::Cdf, x.id))?.value;
    let kept = draw_prediction(p, &cfg.thresholds, x.id, &mut seeds.stream(Domain::Decision, x.id));
    let (record, flows) = match kept {
        Some(r) => (Some(r), None),
        None => (None, Some(ctx.simulator.simulate(x, seeds)?.flows)),
    };
    Ok(Assessment { p, sigma_star: post.sigma_star, record, flows })
}

/// Predicts each scenario with the proxy and simulates only when the proxy is
/// not trusted. Predictions are free; simulations count against the budget.
pub fn run_proxy_process(ctx: &Context, cfg: &ProcessConfig) -> Result<ProcessOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let (seeds, sampler) = ctx.process_seeds(PROXY_TAG);
    let mut train = TrainingSet::new();
    let mut params = cfg.init_params;
    let mut acc = CltAccumulator::default();
    let mut records: Vec<OutcomeRecord> = Vec::new();
    let mut log = IterationLog::default();
    let mut interval = ConfidenceInterval::vacuous(cfg.alpha, Estimator::UncertaintyAware);
    let mut sims = 0u64;
    let mut next_id = 0u64;
    let mut batch_index = 0u64;
    let mut done = false;

    while !done {
        let batch = sampler.sample_batch(cfg.m_batch, next_id)?;
        next_id += cfg.m_batch as u64;
        let assessed =
            batch.par_iter().map(|x| assess(ctx, seeds, &train, &params, cfg, x)).collect::<Result<Vec<_>>>()?;

        let first_row = log.rows.len();
        for (x, a) in batch.into_iter().zip(assessed) {
            let record = match a.flows {
                Some(flows) => {
                    let r = OutcomeRecord::simulated(classify(&flows), x.id);
                    sims += 1;
                    train.push(x, flows)?;
                    r
                }
                None => a.record.expect("kept prediction"),
            };
            acc.push(record.w, record.q);
            records.push(record);
            log.rows.push(IterationRow {
                scenario_id: record.scenario_id,
                p_pred: Some(a.p),
                sigma_star: Some(a.sigma_star),
                entropy: Some(prediction_entropy(a.p)),
                simulated: record.simulated,
                p_min: 0.0,
                p_max: 1.0,
                n_sims: sims,
                elapsed_s: None,
            });
            if sims >= cfg.budget {
                done = true;
                break;
            }
        }

        batch_index += 1;
        if !done && batch_index.is_multiple_of(cfg.refit_period as u64) && train.len() >= crate::mgp::MIN_FIT_POINTS {
            let mut rng = seeds.stream(Domain::Fit, batch_index);
            // A failed fit keeps the previous parameters.
            if let Ok(fitted) = fit_hyperparameters(&train, &params, &ctx.omega, &cfg.fit, &mut rng) {
                params = fitted;
            }
        }

        interval = uncertainty_interval(&acc.summary()?, cfg.alpha)?;
        let elapsed = cfg.record_timing.then(|| start.elapsed().as_secs_f64());
        for row in &mut log.rows[first_row..] {
            row.p_min = interval.p_min;
            row.p_max = interval.p_max;
            row.elapsed_s = elapsed;
        }
        if cfg.stop.satisfied(&interval) {
            done = true;
        }
    }

    Ok(ProcessOutcome {
        interval,
        log,
        iterations: records.len() as u64,
        records,
        simulations: sims,
        final_params: Some(params),
    })
}

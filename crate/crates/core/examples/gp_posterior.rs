// Fit the multivariate GP on simulated flows and predict an unseen scenario.

use zonecert::mgp::{
    fit_hyperparameters, local_subset, omega_from_zone, posterior, FitConfig, KernelParams, LocalityConfig, TrainingSet,
};
use zonecert::netsim::{Simulator, ZoneConfig};
use zonecert::rng::{Domain, SeedSpace};
use zonecert::sampler::{SamplerConfig, ScenarioSampler};

pub fn run_example() -> zonecert::Result<()> {
    let zone = ZoneConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../zones/reference_5x10.json"))?;
    let sampler = ScenarioSampler::new(&SamplerConfig::exponential(zone.num_nodes(), 0.5, 0.5, 3))?;
    let omega = omega_from_zone(&zone);
    let sim = Simulator::new(zone, &sampler)?;
    let seeds = SeedSpace::new(3);

    let mut train = TrainingSet::new();
    for id in 0..300 {
        let x = sampler.sample(id)?;
        let y = sim.simulate(&x, seeds)?;
        train.push(x, y.flows)?;
    }
    let params = fit_hyperparameters(
        &train,
        &KernelParams::default(),
        &omega,
        &FitConfig::default(),
        &mut seeds.stream(Domain::Fit, 0),
    )?;
    println!("fitted: {params:?}");

    let x0 = sampler.sample(10_000)?;
    let local = local_subset(&train, &x0, &LocalityConfig::default());
    let pred = posterior(&local, &x0, &params, &omega)?;
    let truth = sim.simulate(&x0, seeds)?;
    println!("neighbours used: {}", local.len());
    println!("mu*   = {:.3?}", pred.mu_star);
    println!("truth = {:.3?}", truth.flows);
    println!("sigma* = {:.4}", pred.sigma_star);
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

// Draw renewable-injection scenarios from a truncated normal on the unit cube.

use zonecert::sampler::{SamplerConfig, ScenarioSampler};

pub fn run_example() -> zonecert::Result<()> {
    let sampler = ScenarioSampler::new(&SamplerConfig::exponential(10, 0.5, 0.5, 7))?;
    let batch = sampler.sample_batch(1000, 0)?;
    let mean_total = batch.iter().map(|x| x.total()).sum::<f64>() / batch.len() as f64;
    println!("first scenario: {:.3?}", batch[0].values);
    println!("mean total injection over {} scenarios: {mean_total:.3}", batch.len());
    // Same id, same scenario.
    assert_eq!(sampler.sample(0)?, batch[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

// Load the reference zone, look at its curtailment history and simulate a few scenarios.

use zonecert::netsim::{classify, Simulator, ZoneConfig};
use zonecert::rng::SeedSpace;
use zonecert::sampler::{SamplerConfig, ScenarioSampler};

pub fn run_example() -> zonecert::Result<()> {
    let zone = ZoneConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../zones/reference_5x10.json"))?;
    let sampler = ScenarioSampler::new(&SamplerConfig::exponential(zone.num_nodes(), 0.5, 0.5, 1))?;
    let sim = Simulator::new(zone, &sampler)?;

    let curtailed = sim.history().entries.iter().filter(|e| e.beta < 1.0).count();
    println!("history: {} entries, {curtailed} curtailed", sim.history().len());

    let seeds = SeedSpace::new(1);
    let mut safe = 0;
    for id in 0..2000 {
        let y = sim.simulate(&sampler.sample(id)?, seeds)?;
        safe += usize::from(classify(&y.flows));
        if id < 3 {
            println!("scenario {id}: beta={:.3} flows={:.3?}", y.beta_used, y.flows);
        }
    }
    println!("safe fraction over 2000 scenarios: {:.3}", safe as f64 / 2000.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

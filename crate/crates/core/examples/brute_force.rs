// Plain Monte Carlo certification of the reference zone.

use zonecert::certify::{run_brute_force, ProcessConfig};
use zonecert::config::RunConfig;

pub fn run_example() -> zonecert::Result<()> {
    let cfg = RunConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../zones/reference.json"))?;
    let ctx = cfg.build_context()?;
    let out = run_brute_force(&ctx, &ProcessConfig { budget: 5000, ..cfg.process_config() })?;
    println!("{} simulations: p_safe in [{:.4}, {:.4}]", out.simulations, out.interval.p_min, out.interval.p_max);
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

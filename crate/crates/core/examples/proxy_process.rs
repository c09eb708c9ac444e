// Proxy-based certification with a small budget, plus posterior spread, entropy and simulated share.

use zonecert::certify::{moving_average, run_proxy_process, simulated_fraction, ProcessConfig};
use zonecert::config::RunConfig;

pub fn run_example() -> zonecert::Result<()> {
    let cfg = RunConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../zones/reference.json"))?;
    let ctx = cfg.build_context()?;
    let out = run_proxy_process(&ctx, &ProcessConfig { budget: 1000, ..cfg.process_config() })?;
    println!(
        "{} iterations for {} simulations: p_safe in [{:.4}, {:.4}]",
        out.iterations, out.simulations, out.interval.p_min, out.interval.p_max
    );
    println!("final kernel: {:?}", out.final_params);

    let sigma: Vec<f64> = out.log.rows.iter().filter_map(|r| r.sigma_star).collect();
    let smoothed = moving_average(&sigma, 200);
    println!("sigma* (200-avg): first {:.3}, last {:.3}", smoothed[0], smoothed[smoothed.len() - 1]);
    let frac = simulated_fraction(&out.log.rows);
    println!("simulated fraction at the end: {:.3}", frac[frac.len() - 1]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

// Run both processes from a config file and print the comparison table.

use zonecert::certify::ProcessKind;
use zonecert::config::RunConfig;
use zonecert::run::{comparison_table, execute};

pub fn run_example() -> zonecert::Result<()> {
    let mut cfg = RunConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../zones/reference.json"))?;
    cfg.budget = 1000;
    let ctx = cfg.build_context()?;
    let runs = vec![execute(&ctx, &cfg, ProcessKind::Brute)?, execute(&ctx, &cfg, ProcessKind::Proxy)?];
    print!("{}", comparison_table(&runs, cfg.reference_p_safe));
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

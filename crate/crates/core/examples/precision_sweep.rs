// How many simulations the brute-force process needs for a given relative precision.

use zonecert::sweep::{sweep_precision, SweepConfig};

pub fn run_example() -> zonecert::Result<()> {
    let cfg = SweepConfig { precisions: vec![0.35, 0.10], repeats: 20, ..Default::default() };
    let table = sweep_precision(&cfg)?;
    table.write_csv(std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

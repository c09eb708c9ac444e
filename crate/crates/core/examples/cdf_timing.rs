// Evaluation time of the rectangle probability as the number of lines grows.

use zonecert::bench::{bench_cdf, write_bench_csv};

pub fn run_example() -> zonecert::Result<()> {
    let rows = bench_cdf(&[2, 5, 10, 20], 3, 0)?;
    write_bench_csv(&rows, std::io::stdout())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

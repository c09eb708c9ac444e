// Probability that a correlated Gaussian flow vector stays below the line limits.

use nalgebra::DMatrix;
use zonecert::mgp::OutputCovariance;
use zonecert::mvncdf::{prediction_entropy, safe_probability, RectangleProbQuery, DEFAULT_ACCURACY};
use zonecert::rng::{stream, Domain};
use zonecert::stats::norm_cdf;

pub fn run_example() -> zonecert::Result<()> {
    let independent = OutputCovariance::identity(2);
    let q = RectangleProbQuery::new(vec![0.0, 0.0], 1.0, &independent);
    let est = safe_probability(&q, DEFAULT_ACCURACY, &mut stream(0, Domain::Cdf, 0))?;
    println!("independent: {:.6} (exact {:.6})", est.value, norm_cdf(1.0).powi(2));

    let omega = OutputCovariance::new(DMatrix::from_fn(5, 5, |i, j| 0.8f64.powi((i as i32 - j as i32).abs())))?;
    for (mean, scale) in [(0.5, 0.05), (0.9, 0.01), (0.99, 0.001)] {
        let q = RectangleProbQuery::new(vec![mean; 5], scale, &omega);
        let est = safe_probability(&q, DEFAULT_ACCURACY, &mut stream(0, Domain::Cdf, 1))?;
        println!(
            "mean {mean}, scale {scale}: p = {:.5} +/- {:.1e} ({} points), entropy {:.3}",
            est.value,
            est.error,
            est.points,
            prediction_entropy(est.value)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

#![allow(dead_code)]

use std::path::PathBuf;

use zonecert::config::RunConfig;

/// Brute force over 10^6 simulations of the reference zone (run seed 999).
pub const REFERENCE_P_SAFE: f64 = 0.90902;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn reference_config() -> RunConfig {
    RunConfig::load(repo_root().join("zones/reference.json")).expect("reference config")
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the one-sample KS test.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let x = d * (n as f64).sqrt();
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-2.0 * k * k * x * x).exp();
        p += if k as u64 % 2 == 1 { term } else { -term };
    }
    p.clamp(0.0, 1.0)
}

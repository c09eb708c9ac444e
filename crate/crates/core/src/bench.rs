//! Timing of the rectangle probability against dimension.

use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::mgp::OutputCovariance;
use crate::mvncdf::{safe_probability, RectangleProbQuery, DEFAULT_ACCURACY};
use crate::rng::{stream, Domain, Stream};
use crate::{Error, Result};

/// One random problem: a unit-diagonal correlation matrix, a mean and a scale.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub omega: OutputCovariance,
    pub mean: Vec<f64>,
    pub scale: f64,
}

/// Draws an instance from `stream(seed, Bench, dim·2³² + index)`.
pub fn random_instance(dim: usize, seed: u64, index: u64) -> Result<BenchInstance> {
    let mut rng = stream(seed, Domain::Bench, (dim as u64) << 32 | index);
    let a = DMatrix::from_fn(dim, dim, |_, _| sample_normal(&mut rng));
    let mut s = &a * a.transpose() + DMatrix::identity(dim, dim) * dim as f64;
    let d: Vec<f64> = (0..dim).map(|i| s[(i, i)].sqrt()).collect();
    for i in 0..dim {
        for j in 0..dim {
            s[(i, j)] /= d[i] * d[j];
        }
    }
    let omega = OutputCovariance::new(s)?;
    let mean = (0..dim).map(|_| rng.random_range(0.2..0.9)).collect();
    let scale = rng.random_range(0.01..0.1);
    Ok(BenchInstance { omega, mean, scale })
}

fn sample_normal(rng: &mut Stream) -> f64 {
    StandardNormal.sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub dimension: usize,
    pub seconds: f64,
}

/// Mean wall time of one `safe_probability` call per dimension.
pub fn bench_cdf(dims: &[usize], repeats: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if dims.contains(&0) {
        return Err(Error::invalid("dims", "must be at least 1"));
    }
    if repeats == 0 {
        return Err(Error::invalid("repeats", "must be at least 1"));
    }
    let mut rows = Vec::with_capacity(dims.len());
    for &dim in dims {
        let mut total = 0.0;
        for r in 0..repeats as u64 {
            let inst = random_instance(dim, seed, r)?;
            let q = RectangleProbQuery::new(inst.mean, inst.scale, &inst.omega);
            let mut rng = stream(seed, Domain::Cdf, (dim as u64) << 32 | r);
            let start = Instant::now();
            safe_probability(&q, DEFAULT_ACCURACY, &mut rng)?;
            total += start.elapsed().as_secs_f64();
        }
        rows.push(BenchRow { dimension: dim, seconds: total / repeats as f64 });
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dimension", "seconds"])?;
    for r in rows {
        w.write_record([r.dimension.to_string(), format!("{:.6e}", r.seconds)])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_dimension_emits_one_row() {
        let rows = bench_cdf(&[1], 2, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].dimension, 1);
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }

    #[test]
    fn instances_are_reproducible() {
        let a = random_instance(7, 3, 1).unwrap();
        let b = random_instance(7, 3, 1).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.omega.matrix(), b.omega.matrix());
        for i in 0..7 {
            assert!((a.omega.matrix()[(i, i)] - 1.0).abs() < 1e-12);
        }
    }
}

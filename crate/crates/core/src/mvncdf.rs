//! Probability that a multivariate normal flow vector stays below its limits.
//!
//! `P(Y_l <= t for all l)` with `Y ~ N(μ, s·Ω)` is computed with Genz's
//! separation-of-variables transform integrated by a randomly shifted rank-1
//! lattice rule. The spread over independent shifts gives the error estimate.

use nalgebra::DMatrix;
use rand::Rng;
use std::sync::OnceLock;

use crate::mgp::{OutputCovariance, PosteriorPrediction};
use crate::stats::{norm_cdf, norm_quantile_coarse};
use crate::{Error, Result};

pub const DEFAULT_ACCURACY: f64 = 1e-4;
/// Hard cap on integrand evaluations per query.
pub const POINT_BUDGET: usize = 1_000_000;
const SHIFTS: usize = 8;
const FIRST_ROUND: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct RectangleProbQuery<'a> {
    pub mean: Vec<f64>,
    pub scale: f64,
    pub omega: &'a OutputCovariance,
    pub threshold: f64,
}

impl<'a> RectangleProbQuery<'a> {
    pub fn new(mean: Vec<f64>, scale: f64, omega: &'a OutputCovariance) -> Self {
        RectangleProbQuery { mean, scale, omega, threshold: 1.0 }
    }

    /// Safe region of a posterior prediction with unit line limits.
    pub fn from_posterior(post: &PosteriorPrediction<'a>) -> Self {
        RectangleProbQuery::new(post.mu_star.clone(), post.sigma_star, post.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEstimate {
    pub value: f64,
    /// Three standard errors over the random shifts.
    pub error: f64,
    /// False when the point budget ran out before `error <= accuracy`.
    pub converged: bool,
    pub points: usize,
}

impl CdfEstimate {
    fn exact(value: f64) -> Self {
        CdfEstimate { value, error: 0.0, converged: true, points: 0 }
    }
}

/// `P(Y <= threshold)` component-wise. `scale == 0` is a point mass at `mean`.
pub fn safe_probability<R: Rng + ?Sized>(
    q: &RectangleProbQuery<'_>,
    accuracy: f64,
    rng: &mut R,
) -> Result<CdfEstimate> {
    let dim = q.mean.len();
    if dim != q.omega.dim() {
        return Err(Error::DimensionMismatch { expected: q.omega.dim(), found: dim });
    }
    if !(q.scale >= 0.0) {
        return Err(Error::invalid("scale", "must be nonnegative"));
    }
    if !(accuracy > 0.0) {
        return Err(Error::invalid("accuracy", "must be positive"));
    }
    if q.scale == 0.0 {
        let inside = q.mean.iter().all(|&m| m <= q.threshold);
        return Ok(CdfEstimate::exact(if inside { 1.0 } else { 0.0 }));
    }
    let sd = q.scale.sqrt();
    let omega = q.omega.matrix();
    let limits: Vec<f64> = q.mean.iter().map(|m| (q.threshold - m) / sd).collect();
    if dim == 1 {
        return Ok(CdfEstimate::exact(norm_cdf(limits[0] / omega[(0, 0)].sqrt())));
    }

    let (chol, b) = prioritized_cholesky(omega, &limits)?;
    let integrand = SeparatedIntegrand { chol, b };

    // Shifts stay fixed across rounds so each doubling only evaluates the new
    // lattice points.
    let gen = lattice_generator(dim - 1);
    let shifts: Vec<Vec<f64>> = (0..SHIFTS).map(|_| (0..dim - 1).map(|_| rng.random::<f64>()).collect()).collect();
    let mut sums = [0.0; SHIFTS];
    let mut done = 0usize;
    let mut n = FIRST_ROUND;
    let mut best = CdfEstimate { value: 0.0, error: f64::INFINITY, converged: false, points: 0 };
    let mut w = vec![0.0; dim - 1];
    let mut y = vec![0.0; dim];
    loop {
        for (sum, shift) in sums.iter_mut().zip(&shifts) {
            for k in done + 1..=n {
                for (j, wj) in w.iter_mut().enumerate() {
                    let u = (k as f64 * gen[j] + shift[j]).fract();
                    *wj = (2.0 * u - 1.0).abs();
                }
                *sum += integrand.eval(&w, &mut y);
            }
        }
        done = n;
        let used = SHIFTS * n;
        let shift_means = sums.map(|s| s / n as f64);
        let mean = shift_means.iter().sum::<f64>() / SHIFTS as f64;
        let var = shift_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (SHIFTS * (SHIFTS - 1)) as f64;
        let error = 3.0 * var.sqrt();
        if error <= best.error {
            best = CdfEstimate { value: mean.clamp(0.0, 1.0), error, converged: false, points: used };
        }
        if error <= accuracy {
            best.converged = true;
            best.points = used;
            return Ok(best);
        }
        if SHIFTS * 2 * n > POINT_BUDGET {
            best.points = used;
            return Ok(best);
        }
        n *= 2;
    }
}

/// Cholesky factor with the variable ordering of Genz and Bretz: at each step
/// the remaining coordinate with the smallest conditional probability goes
/// next, conditioning on the truncated means of those already placed.
fn prioritized_cholesky(cov: &DMatrix<f64>, limits: &[f64]) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = limits.len();
    let mut c = cov.clone();
    let mut b = limits.to_vec();
    let mut l = DMatrix::zeros(n, n);
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut pick = i;
        let mut best = f64::INFINITY;
        for j in i..n {
            let var = c[(j, j)] - (0..i).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
            if var <= 0.0 {
                continue;
            }
            let shifted = b[j] - (0..i).map(|k| l[(j, k)] * y[k]).sum::<f64>();
            let p = norm_cdf(shifted / var.sqrt());
            if p < best {
                best = p;
                pick = j;
            }
        }
        if pick != i {
            c.swap_rows(i, pick);
            c.swap_columns(i, pick);
            l.swap_rows(i, pick);
            b.swap(i, pick);
        }
        let var = c[(i, i)] - (0..i).map(|k| l[(i, k)] * l[(i, k)]).sum::<f64>();
        if !(var > 0.0) {
            return Err(Error::NumericalFailure("output covariance is not positive definite".into()));
        }
        let d = var.sqrt();
        l[(i, i)] = d;
        for r in i + 1..n {
            l[(r, i)] = (c[(r, i)] - (0..i).map(|k| l[(r, k)] * l[(i, k)]).sum::<f64>()) / d;
        }
        let a = (b[i] - (0..i).map(|k| l[(i, k)] * y[k]).sum::<f64>()) / d;
        let mass = norm_cdf(a);
        y[i] = if mass > 1e-300 { -(-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt() / mass } else { a };
    }
    Ok((l, b))
}

struct SeparatedIntegrand {
    chol: DMatrix<f64>,
    b: Vec<f64>,
}

impl SeparatedIntegrand {
    fn eval(&self, w: &[f64], y: &mut [f64]) -> f64 {
        let dim = self.b.len();
        let mut prod = 1.0;
        for i in 0..dim {
            let mut shifted = self.b[i];
            for (j, yj) in y.iter().enumerate().take(i) {
                shifted -= self.chol[(i, j)] * yj;
            }
            let e = norm_cdf(shifted / self.chol[(i, i)]);
            prod *= e;
            if prod == 0.0 {
                return 0.0;
            }
            if i + 1 < dim {
                let u = (w[i] * e).clamp(1e-300, 1.0 - 1e-16);
                y[i] = norm_quantile_coarse(u);
            }
        }
        prod
    }
}

/// Richtmyer generator: fractional parts of square roots of the first primes.
fn lattice_generator(dim: usize) -> Vec<f64> {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    let primes = PRIMES.get_or_init(|| first_primes(512));
    let mut out: Vec<f64> = primes.iter().take(dim).map(|&p| (p as f64).sqrt().fract()).collect();
    let mut next = *primes.last().unwrap() + 2;
    while out.len() < dim {
        if is_prime(next) {
            out.push((next as f64).sqrt().fract());
        }
        next += 2;
    }
    out
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut k = 2;
    while primes.len() < count {
        if is_prime(k) {
            primes.push(k);
        }
        k += 1;
    }
    primes
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Binary entropy normalised to `[0, 1]`, with `0 log 0 = 0`.
pub fn prediction_entropy(p: f64) -> f64 {
    let term = |v: f64| if v <= 0.0 { 0.0 } else { -v * v.ln() };
    (term(p) + term(1.0 - p)) / std::f64::consts::LN_2
}

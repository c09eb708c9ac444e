//! Matrix-variate normal likelihood and derivative-free hyperparameter search.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{KernelParams, OutputCovariance, TrainingSet, TrainingView};
use crate::{Error, Result};
use faer::linalg::solvers::Solve;

/// Precomputed pieces that do not depend on the kernel parameters.
struct LikelihoodData {
    sq_dist: DMatrix<f64>,
    same: Vec<u64>,
    outputs: faer::Mat<f64>,
    omega_inv: DMatrix<f64>,
    omega_logdet: f64,
}

impl LikelihoodData {
    fn new(view: &TrainingView<'_>, omega: &OutputCovariance) -> Result<Self> {
        let m = view.len();
        if m == 0 {
            return Err(Error::invalid("train", "likelihood needs at least one point"));
        }
        let lines = omega.dim();
        if let Some(k) = (0..m).find(|&k| view.output(k).len() != lines) {
            return Err(Error::DimensionMismatch { expected: lines, found: view.output(k).len() });
        }
        let sq_dist = DMatrix::from_fn(m, m, |i, j| view.input(i).squared_distance(view.input(j)));
        let omega_chol = omega
            .matrix()
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NumericalFailure("output covariance is not positive definite".into()))?;
        let omega_logdet = 2.0 * omega_chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(LikelihoodData {
            sq_dist,
            same: view.inputs().map(|x| x.id).collect(),
            outputs: {
                let y = view.output_matrix(lines);
                faer::Mat::from_fn(m, lines, |i, j| y[(i, j)])
            },
            omega_inv: omega_chol.inverse(),
            omega_logdet,
        })
    }

    fn eval(&self, p: &KernelParams) -> Result<f64> {
        let m = self.outputs.nrows();
        let lines = self.outputs.ncols() as f64;
        let gram =
            faer::Mat::from_fn(m, m, |i, j| p.from_sq_distance(self.sq_dist[(i, j)], self.same[i] == self.same[j]));
        let chol = jittered_llt(gram)?;
        let logdet = 2.0 * (0..m).map(|i| chol.L()[(i, i)].ln()).sum::<f64>();
        let scatter = self.outputs.transpose() * chol.solve(&self.outputs);
        clear_upper_vector_state();
        let l = self.omega_inv.nrows();
        let trace: f64 = (0..l)
            .flat_map(|a| (0..l).map(move |b| (a, b)))
            .map(|(a, b)| self.omega_inv[(a, b)] * scatter[(b, a)])
            .sum();
        let value = -0.5 * trace
            - 0.5 * lines * logdet
            - 0.5 * m as f64 * self.omega_logdet
            - 0.5 * m as f64 * lines * (2.0 * PI).ln();
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NumericalFailure("non-finite log likelihood".into()))
        }
    }
}

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-6;

/// Same jitter schedule as [`super::robust_cholesky`], on the faster dense
/// factorisation used inside the fit loop.
fn jittered_llt(gram: faer::Mat<f64>) -> Result<faer::linalg::solvers::Llt<f64>> {
    if let Ok(c) = gram.llt(faer::Side::Lower) {
        return Ok(c);
    }
    let n = gram.nrows();
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-9) {
        let mut g = gram.clone();
        for i in 0..n {
            g[(i, i)] += jitter;
        }
        if let Ok(c) = g.llt(faer::Side::Lower) {
            return Ok(c);
        }
        jitter *= 10.0;
    }
    Err(Error::NumericalFailure(format!("{n}x{n} gram matrix is not positive definite even with jitter")))
}

/// faer's kernels leave the upper halves of the wide vector registers dirty;
/// the SSE-encoded `exp` calls that build the next Gram matrix then run about
/// 20x slower until the state is cleared.
#[inline]
fn clear_upper_vector_state() {
    #[cfg(target_arch = "x86_64")]
    {
        #[target_feature(enable = "avx")]
        unsafe fn zeroupper() {
            std::arch::x86_64::_mm256_zeroupper();
        }
        if std::is_x86_feature_detected!("avx") {
            // SAFETY: AVX support was just checked.
            unsafe { zeroupper() }
        }
    }
}

/// Log density of `Y_m ~ MN(0, Σ_m, Ω)`.
pub fn log_marginal_likelihood(train: &TrainingView<'_>, p: &KernelParams, omega: &OutputCovariance) -> Result<f64> {
    LikelihoodData::new(train, omega)?.eval(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub sigma0_sq: (f64, f64),
    pub sigmaf_sq: (f64, f64),
    pub length_scale: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        ParamBounds { sigma0_sq: (1e-6, 1.0), sigmaf_sq: (1e-3, 10.0), length_scale: (1e-2, 10.0) }
    }
}

impl ParamBounds {
    fn log_box(&self) -> [(f64, f64); 3] {
        [
            (self.sigma0_sq.0.ln(), self.sigma0_sq.1.ln()),
            (self.sigmaf_sq.0.ln(), self.sigmaf_sq.1.ln()),
            (self.length_scale.0.ln(), self.length_scale.1.ln()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub bounds: ParamBounds,
    /// Points used by the fit; larger sets are subsampled uniformly.
    pub subsample_cap: usize,
    pub max_evals_per_start: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { bounds: ParamBounds::default(), subsample_cap: 500, max_evals_per_start: 150 }
    }
}

pub const MIN_FIT_POINTS: usize = 5;

fn to_log(p: &KernelParams) -> [f64; 3] {
    [p.sigma0_sq.ln(), p.sigmaf_sq.ln(), p.length_scale.ln()]
}

fn from_log(t: &[f64; 3]) -> KernelParams {
    KernelParams { sigma0_sq: t[0].exp(), sigmaf_sq: t[1].exp(), length_scale: t[2].exp() }
}

/// Maximises the likelihood over log-parameters with projected Nelder-Mead from
/// several starts. Never returns parameters worse than `init`.
pub fn fit_hyperparameters<R: Rng + ?Sized>(
    train: &TrainingSet,
    init: &KernelParams,
    omega: &OutputCovariance,
    cfg: &FitConfig,
    rng: &mut R,
) -> Result<KernelParams> {
    let m = train.len();
    if m < MIN_FIT_POINTS {
        return Err(Error::invalid(
            "train",
            format!("hyperparameter fit needs at least {MIN_FIT_POINTS} points, got {m}"),
        ));
    }
    let view = if m > cfg.subsample_cap {
        let mut picked = index::sample(rng, m, cfg.subsample_cap).into_vec();
        picked.sort_unstable();
        train.select(picked)
    } else {
        train.view()
    };
    let data = LikelihoodData::new(&view, omega)?;
    let bounds = cfg.bounds.log_box();
    let clamp = |t: [f64; 3]| -> [f64; 3] {
        let mut out = t;
        for (v, (lo, hi)) in out.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
        out
    };
    let objective = |t: &[f64; 3]| data.eval(&from_log(t)).map_or(f64::INFINITY, |v| -v);

    let starts = [
        clamp(to_log(init)),
        clamp(to_log(&KernelParams { sigma0_sq: 1e-2, sigmaf_sq: 1.0, length_scale: 1.0 })),
        clamp(to_log(&KernelParams { sigma0_sq: 1e-4, sigmaf_sq: 0.3, length_scale: 0.3 })),
    ];
    let results: Vec<([f64; 3], f64)> =
        starts.par_iter().map(|s| nelder_mead(&objective, *s, &clamp, cfg.max_evals_per_start)).collect();

    let init_value = data.eval(init).ok();
    let best = results.into_iter().filter(|(_, f)| f.is_finite()).min_by(|a, b| a.1.total_cmp(&b.1));
    match (best, init_value) {
        (None, None) => Err(Error::OptimizationFailed),
        (None, Some(_)) => Ok(*init),
        (Some((_, f)), Some(v)) if -f < v => Ok(*init),
        (Some((t, _)), _) => Ok(from_log(&t)),
    }
}

/// Minimises `f` over a box, projecting every trial point back into the box.
fn nelder_mead<F, C>(f: &F, start: [f64; 3], clamp: &C, max_evals: usize) -> ([f64; 3], f64)
where
    F: Fn(&[f64; 3]) -> f64,
    C: Fn([f64; 3]) -> [f64; 3],
{
    const STEP: f64 = 0.7;
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for k in 0..3 {
        let mut p = start;
        p[k] += STEP;
        let mut q = clamp(p);
        if q == start {
            p[k] = start[k] - STEP;
            q = clamp(p);
        }
        simplex.push((q, f(&q)));
    }
    let mut evals = 4;
    let combine = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        clamp([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])])
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[3].1);
        if worst.is_finite() && (worst - best).abs() <= 1e-7 * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += p[k] / 3.0;
            }
        }
        let worst_pt = simplex[3].0;
        let reflected = combine(&centroid, &worst_pt, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst_pt, -2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[3].1 {
                combine(&centroid, &reflected, 0.5)
            } else {
                combine(&centroid, &worst_pt, 0.5)
            };
            let fc = f(&contracted);
            evals += 1;
            if fc < simplex[3].1.min(fr) {
                simplex[3] = (contracted, fc);
            } else {
                let anchor = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    let p = combine(&anchor, &s.0, 0.5);
                    *s = (p, f(&p));
                    evals += 1;
                }
            }
        }
    }
    simplex.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty simplex")
}

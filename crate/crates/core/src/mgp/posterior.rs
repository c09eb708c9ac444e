use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{KernelParams, OutputCovariance};
use crate::sampler::{squared_distance, Scenario};
use crate::{Error, Result};

/// Simulated input/output pairs. Predictions never enter this set.
#[derive(Debug, Clone, Default)]
pub struct TrainingSet {
    inputs: Vec<Scenario>,
    outputs: Vec<Vec<f64>>,
}

impl TrainingSet {
    pub fn new() -> Self {
        TrainingSet::default()
    }

    pub fn push(&mut self, x: Scenario, y: Vec<f64>) -> Result<()> {
        if let Some(first) = self.outputs.first() {
            if first.len() != y.len() {
                return Err(Error::DimensionMismatch { expected: first.len(), found: y.len() });
            }
            if self.inputs[0].dim() != x.dim() {
                return Err(Error::DimensionMismatch { expected: self.inputs[0].dim(), found: x.dim() });
            }
        }
        self.inputs.push(x);
        self.outputs.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Scenario] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<f64>] {
        &self.outputs
    }

    pub fn view(&self) -> TrainingView<'_> {
        self.select((0..self.len()).collect())
    }

    pub fn select(&self, indices: Vec<usize>) -> TrainingView<'_> {
        TrainingView { set: self, indices }
    }
}

/// Borrowed subset of a training set.
#[derive(Debug, Clone)]
pub struct TrainingView<'a> {
    set: &'a TrainingSet,
    indices: Vec<usize>,
}

impl<'a> TrainingView<'a> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn input(&self, k: usize) -> &'a Scenario {
        &self.set.inputs[self.indices[k]]
    }

    pub fn output(&self, k: usize) -> &'a [f64] {
        &self.set.outputs[self.indices[k]]
    }

    pub fn inputs(&self) -> impl Iterator<Item = &'a Scenario> + '_ {
        self.indices.iter().map(|&i| &self.set.inputs[i])
    }

    /// Outputs stacked as an `m x L` matrix.
    pub fn output_matrix(&self, num_lines: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), num_lines, |r, c| self.output(r)[c])
    }
}

/// Neighbourhood used for each local prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalityConfig {
    pub max_neighbors: usize,
    pub max_distance: f64,
}

impl Default for LocalityConfig {
    fn default() -> Self {
        LocalityConfig { max_neighbors: 100, max_distance: 1.0 }
    }
}

impl LocalityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_neighbors == 0 {
            return Err(Error::invalid("max_neighbors", "must be at least 1"));
        }
        if !(self.max_distance > 0.0) {
            return Err(Error::invalid("max_distance", "must be positive"));
        }
        Ok(())
    }
}

/// Training points strictly closer than `max_distance` to `x0`, at most
/// `max_neighbors` of them, nearest first (ties by lower draw id).
pub fn local_subset<'a>(train: &'a TrainingSet, x0: &Scenario, loc: &LocalityConfig) -> TrainingView<'a> {
    let radius_sq = loc.max_distance * loc.max_distance;
    let mut hits: Vec<(f64, u64, usize)> = train
        .inputs
        .iter()
        .enumerate()
        .filter_map(|(i, x)| {
            let d2 = squared_distance(&x.values, &x0.values);
            (d2 < radius_sq).then_some((d2, x.id, i))
        })
        .collect();
    let order = |a: &(f64, u64, usize), b: &(f64, u64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if hits.len() > loc.max_neighbors {
        hits.select_nth_unstable_by(loc.max_neighbors - 1, order);
        hits.truncate(loc.max_neighbors);
    }
    hits.sort_unstable_by(order);
    train.select(hits.into_iter().map(|h| h.2).collect())
}

/// `Σ_m` for the points of `view`.
pub fn gram_matrix(view: &TrainingView<'_>, p: &KernelParams) -> DMatrix<f64> {
    let m = view.len();
    let mut k = DMatrix::zeros(m, m);
    for i in 0..m {
        let xi = view.input(i);
        for j in 0..=i {
            let xj = view.input(j);
            let v = p.from_sq_distance(xi.squared_distance(xj), xi.id == xj.id);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-6;

/// Cholesky factorisation, retrying with diagonal jitter `1e-10, 1e-9, ..., 1e-6`.
pub fn robust_cholesky(matrix: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = matrix.clone().cholesky() {
        return Ok(c);
    }
    let n = matrix.nrows();
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-9) {
        let mut m = matrix.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(c) = m.cholesky() {
            return Ok(c);
        }
        jitter *= 10.0;
    }
    Err(Error::NumericalFailure(format!("{n}x{n} covariance is not positive definite even with jitter {JITTER_MAX:e}")))
}

/// Conditional law `N(μ*, σ* Ω)` of a new flow vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorPrediction<'a> {
    pub mu_star: Vec<f64>,
    pub sigma_star: f64,
    pub omega: &'a OutputCovariance,
}

impl PosteriorPrediction<'_> {
    pub fn covariance(&self) -> DMatrix<f64> {
        self.omega.matrix() * self.sigma_star
    }
}

/// Conditions the zero-mean prior on the points of `train`.
pub fn posterior<'o>(
    train: &TrainingView<'_>,
    x0: &Scenario,
    p: &KernelParams,
    omega: &'o OutputCovariance,
) -> Result<PosteriorPrediction<'o>> {
    let lines = omega.dim();
    let m = train.len();
    let prior = p.from_sq_distance(0.0, true);
    if m == 0 {
        return Ok(PosteriorPrediction { mu_star: vec![0.0; lines], sigma_star: prior, omega });
    }
    if let Some(k) = (0..m).find(|&k| train.output(k).len() != lines) {
        return Err(Error::DimensionMismatch { expected: lines, found: train.output(k).len() });
    }
    if train.input(0).dim() != x0.dim() {
        return Err(Error::DimensionMismatch { expected: train.input(0).dim(), found: x0.dim() });
    }
    let chol = robust_cholesky(gram_matrix(train, p))?;
    let cross =
        DVector::from_iterator(m, train.inputs().map(|x| p.from_sq_distance(x.squared_distance(x0), x.id == x0.id)));
    let weights = chol.solve(&train.output_matrix(lines));
    let mu = weights.transpose() * &cross;
    let half = chol
        .l_dirty()
        .solve_lower_triangular(&cross)
        .ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".into()))?;
    let sigma_star = (prior - half.norm_squared()).max(0.0);
    Ok(PosteriorPrediction { mu_star: mu.as_slice().to_vec(), sigma_star, omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set(points: &[(&[f64], &[f64])]) -> TrainingSet {
        let mut t = TrainingSet::new();
        for (i, (x, y)) in points.iter().enumerate() {
            t.push(Scenario::new(i as u64, x.to_vec()), y.to_vec()).unwrap();
        }
        t
    }

    #[test]
    fn prior_without_data() {
        let omega = OutputCovariance::identity(3);
        let t = TrainingSet::new();
        let post = posterior(&t.view(), &Scenario::new(0, vec![0.3]), &KernelParams::default(), &omega).unwrap();
        assert_eq!(post.mu_star, vec![0.0; 3]);
        assert_abs_diff_eq!(post.sigma_star, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn single_point_closed_forms() {
        let omega = OutputCovariance::identity(2);
        let t = set(&[(&[0.4, 0.6], &[0.7, -0.2])]);
        let x0 = Scenario::new(99, vec![0.4, 0.6]);

        let noisy = KernelParams { sigma0_sq: 0.1, sigmaf_sq: 0.9, length_scale: 0.5 };
        let post = posterior(&t.view(), &x0, &noisy, &omega).unwrap();
        assert_abs_diff_eq!(post.mu_star[0], 0.9 * 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(post.mu_star[1], 0.9 * -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(post.sigma_star, 0.19, epsilon = 1e-12);

        let exact = KernelParams { sigma0_sq: 0.0, sigmaf_sq: 1.0, length_scale: 0.5 };
        let post = posterior(&t.view(), &x0, &exact, &omega).unwrap();
        assert_abs_diff_eq!(post.mu_star[0], 0.7, epsilon = 1e-8);
        assert_abs_diff_eq!(post.sigma_star, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn covariance_has_the_shape_of_omega() {
        let omega = OutputCovariance::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.6, 1.0])).unwrap();
        let t = set(&[(&[0.1], &[0.2, 0.3]), (&[0.5], &[0.4, 0.1])]);
        let post = posterior(&t.view(), &Scenario::new(7, vec![0.3]), &KernelParams::default(), &omega).unwrap();
        let cov = post.covariance();
        assert_abs_diff_eq!(cov[(0, 1)] / (cov[(0, 0)] * cov[(1, 1)]).sqrt(), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn local_subset_filters_then_truncates() {
        let t = TrainingSet::new();
        let x0 = Scenario::new(100, vec![0.0]);
        let loc = LocalityConfig { max_neighbors: 2, max_distance: 0.5 };
        assert!(local_subset(&t, &x0, &loc).is_empty());

        let t = set(&[(&[0.9], &[0.0]), (&[0.2], &[0.0]), (&[0.1], &[0.0])]);
        let sub = local_subset(&t, &x0, &loc);
        assert_eq!(sub.indices(), &[2, 1]);
    }

    #[test]
    fn local_subset_ties_prefer_lower_id() {
        let t = set(&[(&[0.3], &[0.0]), (&[-0.3], &[0.0]), (&[0.3], &[0.0])]);
        let loc = LocalityConfig { max_neighbors: 2, max_distance: 1.0 };
        let sub = local_subset(&t, &Scenario::new(100, vec![0.0]), &loc);
        assert_eq!(sub.indices(), &[0, 1]);
    }

    #[test]
    fn jitter_rescues_duplicate_points() {
        let k = DMatrix::from_element(3, 3, 1.0);
        assert!(robust_cholesky(k).is_ok());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(robust_cholesky(bad), Err(Error::NumericalFailure(_))));
    }
}

use nalgebra::DMatrix;

use crate::netsim::ZoneConfig;
use crate::{Error, Result};

/// Fixed output covariance `Ω` shared by every prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputCovariance {
    matrix: DMatrix<f64>,
}

impl OutputCovariance {
    /// Checks symmetry (1e-12) and positive definiteness.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::invalid("omega", "must be a non-empty square matrix"));
        }
        for i in 0..n {
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid("omega", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        if min_eigenvalue(&matrix) <= 0.0 {
            return Err(Error::invalid("omega", "not positive definite"));
        }
        Ok(OutputCovariance { matrix })
    }

    pub fn identity(n: usize) -> Self {
        OutputCovariance { matrix: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

const MIN_EIGENVALUE: f64 = 1e-8;

/// Cosine similarity of the PTDF rows, lifted by the smallest `λ` in
/// `{0, 1e-8, 1e-6, ...}` that makes it positive definite, then rescaled to a unit
/// diagonal.
pub fn omega_from_zone(zone: &ZoneConfig) -> OutputCovariance {
    let rows: Vec<&Vec<f64>> = zone.ptdf.iter().collect();
    let lines = rows.len();
    let norms: Vec<f64> = rows.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let cosine = DMatrix::from_fn(lines, lines, |i, j| {
        if i == j {
            1.0
        } else if norms[i] == 0.0 || norms[j] == 0.0 {
            0.0
        } else {
            rows[i].iter().zip(rows[j]).map(|(a, b)| a * b).sum::<f64>() / (norms[i] * norms[j])
        }
    });
    let mut lambda = 0.0;
    loop {
        let lifted = (&cosine + DMatrix::<f64>::identity(lines, lines) * lambda) / (1.0 + lambda);
        let lifted = (&lifted + lifted.transpose()) * 0.5;
        if min_eigenvalue(&lifted) >= MIN_EIGENVALUE || lambda >= 1.0 {
            return OutputCovariance { matrix: lifted };
        }
        lambda = if lambda == 0.0 { 1e-8 } else { lambda * 100.0 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn zone(ptdf: Vec<Vec<f64>>) -> ZoneConfig {
        ZoneConfig { ptdf, noise_sigma: 0.0, history_size: 1, eta: 0.1, seed: 0 }
    }

    #[test]
    fn orthogonal_rows_give_identity() {
        let o = omega_from_zone(&zone(vec![vec![1.0, 0.0], vec![0.0, 2.0]]));
        assert_eq!(o.matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn identical_rows_are_regularised() {
        let o = omega_from_zone(&zone(vec![vec![0.2, 0.3]; 3]));
        assert!(o.min_eigenvalue() >= 1e-8);
        for i in 0..3 {
            assert_abs_diff_eq!(o.matrix()[(i, i)], 1.0, epsilon = 1e-15);
        }
        assert!(o.matrix()[(0, 1)] > 0.999);
        assert!(OutputCovariance::new(o.matrix().clone()).is_ok());
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(OutputCovariance::new(asym).is_err());
        let singular = DMatrix::from_element(2, 2, 1.0);
        assert!(OutputCovariance::new(singular).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::sampler::Scenario;
use crate::{Error, Result};

/// `θ = [σ0², σf², l]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub sigma0_sq: f64,
    pub sigmaf_sq: f64,
    pub length_scale: f64,
}

impl Default for KernelParams {
    /// Prior variance `σf² + σ0² = 1`.
    fn default() -> Self {
        KernelParams { sigma0_sq: 0.1, sigmaf_sq: 0.9, length_scale: 0.5 }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0_sq >= 0.0 && self.sigma0_sq.is_finite()) {
            return Err(Error::invalid("sigma0_sq", "must be finite and nonnegative"));
        }
        if !(self.sigmaf_sq > 0.0 && self.sigmaf_sq.is_finite()) {
            return Err(Error::invalid("sigmaf_sq", "must be finite and positive"));
        }
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(Error::invalid("length_scale", "must be finite and positive"));
        }
        Ok(())
    }

    /// Prior variance of one output coordinate (before `Ω`).
    pub fn prior_variance(&self) -> f64 {
        self.sigmaf_sq + self.sigma0_sq
    }

    /// Kernel value from a precomputed squared distance.
    pub fn from_sq_distance(&self, d2: f64, same_point: bool) -> f64 {
        let signal = self.sigmaf_sq * (-d2 / (2.0 * self.length_scale * self.length_scale)).exp();
        if same_point {
            signal + self.sigma0_sq
        } else {
            signal
        }
    }
}

/// Squared-exponential kernel with a nugget on identical draws.
///
/// The nugget applies when both arguments are the same draw (same id), not merely
/// the same coordinates: repeated inputs are separate noisy observations.
pub fn kernel(x1: &Scenario, x2: &Scenario, p: &KernelParams) -> Result<f64> {
    if x1.dim() != x2.dim() {
        return Err(Error::DimensionMismatch { expected: x1.dim(), found: x2.dim() });
    }
    Ok(p.from_sq_distance(x1.squared_distance(x2), x1.id == x2.id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn values() {
        let p = KernelParams { sigma0_sq: 0.1, sigmaf_sq: 0.9, length_scale: 0.5 };
        let a = Scenario::new(0, vec![0.2, 0.4]);
        assert_abs_diff_eq!(kernel(&a, &a, &p).unwrap(), 1.0, epsilon = 1e-15);

        let b = Scenario::new(1, vec![0.5, 0.8]); // distance 0.5
        assert_abs_diff_eq!(kernel(&a, &b, &p).unwrap(), 0.9 * (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(kernel(&a, &b, &p).unwrap(), 0.5459, epsilon = 1e-4);

        let far = Scenario::new(2, vec![50.0, 50.0]);
        assert!(kernel(&a, &far, &p).unwrap() < 1e-300);

        let twin = Scenario::new(9, a.values.clone());
        assert_abs_diff_eq!(kernel(&a, &twin, &p).unwrap(), 0.9, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let p = KernelParams::default();
        let a = Scenario::new(0, vec![0.2]);
        let b = Scenario::new(1, vec![0.2, 0.1]);
        assert!(kernel(&a, &b, &p).is_err());
    }
}

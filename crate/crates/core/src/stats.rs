//! Standard normal helpers shared by the interval and integration code.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{PI, SQRT_2};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal quantile; `p` is clamped to the open unit interval.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    // Two Halley steps on the accurate CDF polish the statrs inverse.
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        if pdf == 0.0 {
            break;
        }
        let r = (norm_cdf(x) - p) / pdf;
        x -= r / (1.0 + 0.5 * x * r);
    }
    x
}

/// Quantile accurate to about 1e-11, for inner loops.
pub(crate) fn norm_quantile_coarse(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// The two-sided critical value `Q` with `P(|N(0,1)| <= Q) = 1 - alpha`.
pub fn two_sided_quantile(alpha: f64) -> f64 {
    norm_quantile(1.0 - alpha / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        assert_abs_diff_eq!(norm_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-14);
        assert_abs_diff_eq!(two_sided_quantile(0.05), 1.959_963_984_540_054, epsilon = 1e-12);
        assert_abs_diff_eq!(two_sided_quantile(0.01), 2.575_829_303_548_900_4, epsilon = 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &x in &[-6.0, -2.5, -0.3, 0.0, 0.7, 3.1, 6.0] {
            assert_abs_diff_eq!(norm_quantile(norm_cdf(x)), x, epsilon = 1e-8);
        }
    }
}

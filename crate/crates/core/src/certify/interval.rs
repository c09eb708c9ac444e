//! Score intervals for a proportion.
//!
//! The classic interval inverts the normal approximation of a binomial mean. The
//! uncertainty-aware one inverts the same approximation for the debiased average
//! of `(w, q)` records, whose variance carries an extra `σ_m²` term.

use serde::{Deserialize, Serialize};

use super::OutcomeRecord;
use crate::stats::two_sided_quantile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Classic,
    UncertaintyAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub p_min: f64,
    pub p_max: f64,
    pub alpha: f64,
    pub estimator: Estimator,
}

impl ConfidenceInterval {
    /// `[0, 1]`, the interval before any observation.
    pub fn vacuous(alpha: f64, estimator: Estimator) -> Self {
        ConfidenceInterval { p_min: 0.0, p_max: 1.0, alpha, estimator }
    }

    pub fn length(&self) -> f64 {
        self.p_max - self.p_min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.p_min + self.p_max)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.p_min <= p && p <= self.p_max
    }

    /// Half-width relative to the distance from the midpoint to the nearer end of
    /// `[0, 1]`. Never exceeds 1 since the interval lies inside `[0, 1]`.
    pub fn relative_half_width(&self) -> f64 {
        let c = self.midpoint();
        let room = c.min(1.0 - c);
        if room <= 0.0 {
            return f64::INFINITY;
        }
        0.5 * self.length() / room
    }
}

fn clamp_interval(lo: f64, hi: f64, alpha: f64, estimator: Estimator) -> ConfidenceInterval {
    let p_min = lo.clamp(0.0, 1.0);
    let p_max = hi.clamp(0.0, 1.0).max(p_min);
    ConfidenceInterval { p_min, p_max, alpha, estimator }
}

/// Classic score interval from a sample mean over `m` outcomes.
pub fn wilson_from_mean(mean: f64, m: f64, alpha: f64) -> ConfidenceInterval {
    let q = two_sided_quantile(alpha);
    let q2 = q * q;
    let center = mean + q2 / (2.0 * m);
    let radius = q * (mean * (1.0 - mean) / m + q2 / (4.0 * m * m)).max(0.0).sqrt();
    let denom = 1.0 + q2 / m;
    clamp_interval((center - radius) / denom, (center + radius) / denom, alpha, Estimator::Classic)
}

/// Classic interval around `p_safe` from fully trusted outcomes.
pub fn classic_interval(w: &[bool], alpha: f64) -> Result<ConfidenceInterval> {
    if w.is_empty() {
        return Err(Error::invalid("w_values", "need at least one outcome"));
    }
    check_alpha(alpha)?;
    let m = w.len() as f64;
    let mean = w.iter().filter(|&&b| b).count() as f64 / m;
    Ok(wilson_from_mean(mean, m, alpha))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("{alpha} is not in (0, 1)")))
    }
}

/// `Z̄_m`, `v_m` and `σ_m²` of a set of `(w, q)` records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltSummary {
    pub z_bar: f64,
    pub v: f64,
    pub sigma_sq: f64,
    pub m: u64,
}

/// Running sums behind [`CltSummary`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CltAccumulator {
    numerator: f64,
    weight: f64,
    weight_sq: f64,
    spread: f64,
    m: u64,
}

impl CltAccumulator {
    pub fn push(&mut self, w: bool, q: f64) {
        let k = 2.0 * q - 1.0;
        self.numerator += f64::from(u8::from(w)) - (1.0 - q);
        self.weight += k;
        self.weight_sq += k * k;
        self.spread += q * (1.0 - q);
        self.m += 1;
    }

    pub fn len(&self) -> u64 {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn summary(&self) -> Result<CltSummary> {
        if !(self.weight > 0.0) || !(self.weight_sq > 0.0) {
            return Err(Error::DegenerateWeights(self.weight));
        }
        Ok(CltSummary {
            z_bar: self.numerator / self.weight,
            v: self.weight * self.weight / self.weight_sq,
            sigma_sq: self.spread / self.weight_sq,
            m: self.m,
        })
    }
}

pub fn clt_summary(records: &[OutcomeRecord]) -> Result<CltSummary> {
    let mut acc = CltAccumulator::default();
    for r in records {
        acc.push(r.w, r.q);
    }
    acc.summary()
}

/// Interval obtained by solving the quadratic inequality in `p_safe` implied by
/// the asymptotic normality of `√v (Z̄ - p) / √(σ² + p(1-p))`.
pub fn uncertainty_interval(s: &CltSummary, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    if !(s.v > 0.0) {
        return Err(Error::DegenerateWeights(s.v));
    }
    let q = two_sided_quantile(alpha);
    let q2_v = q * q / s.v;
    let z = s.z_bar;
    let radicand = z * (1.0 - z) / s.v + s.sigma_sq / s.v * (1.0 + q2_v) + q2_v / (4.0 * s.v);
    let radius = q * radicand.max(0.0).sqrt();
    let center = z + q2_v / 2.0;
    let denom = 1.0 + q2_v;
    Ok(clamp_interval((center - radius) / denom, (center + radius) / denom, alpha, Estimator::UncertaintyAware))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rec(w: bool, q: f64) -> OutcomeRecord {
        OutcomeRecord { w, q, simulated: q == 1.0, scenario_id: 0 }
    }

    #[test]
    fn half_successes_at_one_hundred() {
        let w: Vec<bool> = (0..100).map(|i| i < 50).collect();
        let ci = classic_interval(&w, 0.05).unwrap();
        assert_abs_diff_eq!(ci.p_min, 0.4038, epsilon = 1e-4);
        assert_abs_diff_eq!(ci.p_max, 0.5962, epsilon = 1e-4);
        assert_eq!(ci.estimator, Estimator::Classic);
    }

    #[test]
    fn boundary_cases() {
        let ci = classic_interval(&vec![true; 100_000], 0.05).unwrap();
        assert_eq!(ci.p_max, 1.0);
        assert!(ci.p_min > 0.9999);
        let one = classic_interval(&[true], 0.05).unwrap();
        assert!(one.contains(0.5));
        assert!(classic_interval(&[], 0.05).is_err());
        assert!(classic_interval(&[true], 1.5).is_err());
    }

    #[test]
    fn summary_of_trusted_records() {
        let recs = [rec(true, 1.0), rec(true, 1.0), rec(false, 1.0), rec(true, 1.0)];
        let s = clt_summary(&recs).unwrap();
        assert_abs_diff_eq!(s.z_bar, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(s.v, 4.0, epsilon = 1e-15);
        assert_eq!(s.sigma_sq, 0.0);
    }

    #[test]
    fn summary_with_one_prediction() {
        let s = clt_summary(&[rec(true, 1.0), rec(true, 0.9)]).unwrap();
        assert_abs_diff_eq!(s.z_bar, 1.9 / 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.v, 1.8 * 1.8 / 1.64, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sigma_sq, 0.09 / 1.64, epsilon = 1e-12);
        assert!(s.v <= 2.0);
    }

    #[test]
    fn degenerate_weights() {
        assert!(matches!(clt_summary(&[rec(true, 0.5)]), Err(Error::DegenerateWeights(_))));
        assert!(matches!(clt_summary(&[rec(false, 0.2)]), Err(Error::DegenerateWeights(_))));
    }

    #[test]
    fn no_uncertainty_reduces_to_classic() {
        let s = CltSummary { z_bar: 0.37, v: 250.0, sigma_sq: 0.0, m: 250 };
        let a = uncertainty_interval(&s, 0.05).unwrap();
        let b = wilson_from_mean(0.37, 250.0, 0.05);
        assert_abs_diff_eq!(a.p_min, b.p_min, epsilon = 1e-12);
        assert_abs_diff_eq!(a.p_max, b.p_max, epsilon = 1e-12);
    }

    #[test]
    fn uncertainty_widens() {
        let base = CltSummary { z_bar: 0.9, v: 1000.0, sigma_sq: 0.0, m: 1000 };
        let wide = CltSummary { sigma_sq: 0.02, ..base };
        let a = uncertainty_interval(&base, 0.05).unwrap();
        let b = uncertainty_interval(&wide, 0.05).unwrap();
        assert!(b.p_min < a.p_min && b.p_max > a.p_max);
    }

    #[test]
    fn roots_of_the_defining_inequality() {
        // Endpoints are the roots of v (Z̄ - p)² = Q² (σ² + p(1-p)); find them by
        // bisection on each side of Z̄.
        let s = CltSummary { z_bar: 0.9, v: 1000.0, sigma_sq: 0.02, m: 1000 };
        let q = two_sided_quantile(0.05);
        let g = |p: f64| s.v * (s.z_bar - p).powi(2) - q * q * (s.sigma_sq + p * (1.0 - p));
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (g(lo) > 0.0) == (g(mid) > 0.0) {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            0.5 * (lo + hi)
        };
        let lower = bisect(0.0, s.z_bar);
        let upper = bisect(s.z_bar, 1.0);
        let ci = uncertainty_interval(&s, 0.05).unwrap();
        assert_abs_diff_eq!(ci.p_min, lower, epsilon = 1e-12);
        assert_abs_diff_eq!(ci.p_max, upper, epsilon = 1e-12);
    }

    #[test]
    fn relative_half_width_is_at_most_one() {
        for (mean, m) in [(1.0, 1.0), (0.0, 1.0), (0.3, 5.0), (0.95, 400.0)] {
            let ci = wilson_from_mean(mean, m, 0.01);
            assert!(ci.relative_half_width() <= 1.0 + 1e-12);
        }
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One outcome fed to the interval: the observed or drawn answer `w` and the
/// probability `q` that it equals the true answer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub w: bool,
    pub q: f64,
    pub simulated: bool,
    pub scenario_id: u64,
}

impl OutcomeRecord {
    pub fn simulated(w: bool, scenario_id: u64) -> Self {
        OutcomeRecord { w, q: 1.0, simulated: true, scenario_id }
    }
}

/// The proxy is trusted when its safety probability is at most `p_inf` or at
/// least `p_sup`. A threshold sitting on 0 (or 1) switches that side off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionThresholds {
    pub p_inf: f64,
    pub p_sup: f64,
}

impl Default for DecisionThresholds {
    fn default() -> Self {
        DecisionThresholds { p_inf: 0.01, p_sup: 0.99 }
    }
}

impl DecisionThresholds {
    pub fn new(p_inf: f64, p_sup: f64) -> Result<Self> {
        let t = DecisionThresholds { p_inf, p_sup };
        t.validate()?;
        Ok(t)
    }

    /// Thresholds that never trust the proxy.
    pub fn never() -> Self {
        DecisionThresholds { p_inf: 0.0, p_sup: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.p_inf) {
            return Err(Error::invalid("p_inf", format!("{} is not in [0, 0.5)", self.p_inf)));
        }
        if !(self.p_sup > 0.5 && self.p_sup <= 1.0) {
            return Err(Error::invalid("p_sup", format!("{} is not in (0.5, 1]", self.p_sup)));
        }
        Ok(())
    }

    pub fn trusts(&self, p: f64) -> bool {
        (self.p_inf > 0.0 && p <= self.p_inf) || (self.p_sup < 1.0 && p >= self.p_sup)
    }
}

/// Keeps a confident prediction as a Bernoulli draw, or returns `None` when the
/// scenario has to be simulated.
///
/// A kept record has `q = p` when the draw is safe and `q = 1 - p` otherwise, so
/// an unlucky draw on the improbable side carries `q < 0.5`.
pub fn draw_prediction<R: Rng + ?Sized>(
    p: f64,
    thresholds: &DecisionThresholds,
    scenario_id: u64,
    rng: &mut R,
) -> Option<OutcomeRecord> {
    if !thresholds.trusts(p) {
        return None;
    }
    let w = rng.random::<f64>() < p;
    let q = if w { p } else { 1.0 - p };
    Some(OutcomeRecord { w, q, simulated: false, scenario_id })
}

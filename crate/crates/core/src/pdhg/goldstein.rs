//! Residual balancing with geometrically shrinking adaptation strength.

use crate::error::{Error, Result};

use super::iteration::ResidualPair;
use super::steps::StepSizes;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldsteinState {
    pub alpha: f64,
    pub eta: f64,
    pub delta_ratio: f64,
    pub alpha_floor: f64,
}

impl Default for GoldsteinState {
    fn default() -> Self {
        Self { alpha: 0.5, eta: 0.95, delta_ratio: 1.5, alpha_floor: 1e-4 }
    }
}

impl GoldsteinState {
    pub fn new(alpha: f64, eta: f64, delta_ratio: f64, alpha_floor: f64) -> Result<Self> {
        let ok = (0.0..1.0).contains(&alpha)
            && eta > 0.0
            && eta < 1.0
            && delta_ratio > 1.0
            && alpha_floor > 0.0;
        if ok {
            Ok(Self { alpha, eta, delta_ratio, alpha_floor })
        } else {
            Err(Error::InvalidArgument(format!(
                "Goldstein parameters out of range: α={alpha}, η={eta}, Δ={delta_ratio}, α̲={alpha_floor}"
            )))
        }
    }

    /// A state that never adapts.
    pub fn disabled() -> Self {
        Self { alpha: 0.0, ..Self::default() }
    }

    pub fn is_active(&self) -> bool {
        self.alpha > self.alpha_floor
    }

    /// Bounds `[(1−α)^{1/(1−η)}, (1−α)^{−1/(1−η)}]` on the total change of τ
    /// from this state on.
    pub fn envelope(&self) -> (f64, f64) {
        let e = (1.0 - self.alpha).powf(1.0 / (1.0 - self.eta));
        (e, 1.0 / e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoldsteinChange {
    Unchanged,
    IncreasedTau,
    DecreasedTau,
}

/// One adaptation step from the 1-norms of the residuals.
pub fn goldstein_update_norms(
    p_norm1: f64,
    d_norm1: f64,
    s: StepSizes,
    g: GoldsteinState,
) -> (StepSizes, GoldsteinState, GoldsteinChange) {
    if !g.is_active() || (p_norm1 == 0.0 && d_norm1 == 0.0) {
        return (s, g, GoldsteinChange::Unchanged);
    }
    let a = g.alpha;
    let next = GoldsteinState { alpha: a * g.eta, ..g };
    if p_norm1 >= g.delta_ratio * d_norm1 {
        (StepSizes { tau: s.tau / (1.0 - a), sigma: s.sigma * (1.0 - a) }, next, GoldsteinChange::IncreasedTau)
    } else if d_norm1 >= g.delta_ratio * p_norm1 {
        (StepSizes { tau: s.tau * (1.0 - a), sigma: s.sigma / (1.0 - a) }, next, GoldsteinChange::DecreasedTau)
    } else {
        (s, g, GoldsteinChange::Unchanged)
    }
}

pub fn goldstein_update(
    r: &ResidualPair,
    s: StepSizes,
    g: GoldsteinState,
) -> (StepSizes, GoldsteinState, GoldsteinChange) {
    goldstein_update_norms(r.p_norm1, r.d_norm1, s, g)
}

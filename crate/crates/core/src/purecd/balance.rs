use crate::pdhg::{goldstein_update_norms, GoldsteinChange, GoldsteinState, StepSizes};

/// Accumulates squared residual estimates over a window of iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualWindow {
    pub capacity: usize,
    primal_sum: f64,
    dual_sum: f64,
    len: usize,
}

impl ResidualWindow {
    pub fn new(capacity: usize) -> Self {
        Self { capacity: capacity.max(1), primal_sum: 0.0, dual_sum: 0.0, len: 0 }
    }

    pub fn push(&mut self, primal_sq: f64, dual_sq: f64) {
        self.primal_sum += primal_sq;
        self.dual_sum += dual_sq;
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len >= self.capacity
    }

    pub fn clear(&mut self) {
        *self = Self::new(self.capacity);
    }

    /// Root-mean-square primal and dual estimates.
    pub fn rms(&self) -> (f64, f64) {
        if self.len == 0 {
            return (0.0, 0.0);
        }
        let k = self.len as f64;
        ((self.primal_sum / k).sqrt(), (self.dual_sum / k).sqrt())
    }
}

/// Goldstein comparison on window RMS residuals, acting on `s`. A dominant
/// primal residual calls for a larger `τ` and smaller `σ`, so `s` shrinks.
/// Returns `s` unchanged until the window holds `capacity` samples.
pub fn residual_balance_purecd(window: &ResidualWindow, s: f64, g: GoldsteinState) -> (f64, GoldsteinState, GoldsteinChange) {
    if !window.is_full() {
        return (s, g, GoldsteinChange::Unchanged);
    }
    let (p, d) = window.rms();
    // τ ∝ 1/s and σ ∝ s under the step maps.
    let (steps, g, change) = goldstein_update_norms(p, d, StepSizes { tau: 1.0 / s, sigma: s }, g);
    (steps.sigma, g, change)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(p: f64, d: f64, n: usize) -> ResidualWindow {
        let mut w = ResidualWindow::new(n);
        for _ in 0..n {
            w.push(p * p, d * d);
        }
        w
    }

    #[test]
    fn balanced_window_keeps_s() {
        let (s, g, c) = residual_balance_purecd(&window(1.0, 1.2, 50), 0.7, GoldsteinState::default());
        assert_eq!(s, 0.7);
        assert_eq!(g, GoldsteinState::default());
        assert_eq!(c, GoldsteinChange::Unchanged);
    }

    #[test]
    fn primal_dominance_decreases_s() {
        let (s, g, c) = residual_balance_purecd(&window(3.0, 1.0, 50), 1.0, GoldsteinState::default());
        assert!((s - 0.5).abs() < 1e-15);
        assert!((g.alpha - 0.475).abs() < 1e-15);
        assert_eq!(c, GoldsteinChange::IncreasedTau);
        let (s, _, _) = residual_balance_purecd(&window(1.0, 3.0, 50), 1.0, GoldsteinState::default());
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exhausted_alpha_freezes_s() {
        let g = GoldsteinState { alpha: 1e-5, ..GoldsteinState::default() };
        let (s, g2, _) = residual_balance_purecd(&window(10.0, 1.0, 50), 1.0, g);
        assert_eq!((s, g2), (1.0, g));
    }

    #[test]
    fn partial_window_waits() {
        let (s, _, _) = residual_balance_purecd(&window(10.0, 1.0, 10).resized(50), 1.0, GoldsteinState::default());
        assert_eq!(s, 1.0);
    }

    impl ResidualWindow {
        fn resized(mut self, capacity: usize) -> Self {
            self.capacity = capacity;
            self
        }
    }
}

//! Per-iteration run records shared by all solvers.

use std::fmt;

use crate::linalg::PrimalDualPoint;

/// Something that happened at an iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    GoldsteinTauUp,
    GoldsteinTauDown,
    RateEstimate,
    StepUp,
    StepDown,
    Revert,
    BalanceUp,
    BalanceDown,
    EpochEnd,
    MonitorAccept,
    MonitorReject,
    MonitorInconclusive,
    Converged,
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::GoldsteinTauUp => "goldstein_tau_up",
            Event::GoldsteinTauDown => "goldstein_tau_down",
            Event::RateEstimate => "rate_estimate",
            Event::StepUp => "step_up",
            Event::StepDown => "step_down",
            Event::Revert => "revert",
            Event::BalanceUp => "balance_up",
            Event::BalanceDown => "balance_down",
            Event::EpochEnd => "epoch_end",
            Event::MonitorAccept => "monitor_accept",
            Event::MonitorReject => "monitor_reject",
            Event::MonitorInconclusive => "monitor_inconclusive",
            Event::Converged => "converged",
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One trace row. For coordinate methods a row covers one pass and `tau`
/// holds the step parameter `s` while `sigma` is NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub time_seconds: f64,
    pub tau: f64,
    pub sigma: f64,
    pub vnorm_diff: f64,
    pub primal_res_1: f64,
    pub dual_res_1: f64,
    pub gap: Option<f64>,
    pub rate_estimate: Option<f64>,
    pub distance: Option<f64>,
    pub events: Vec<Event>,
}

impl IterationRecord {
    pub fn event_string(&self) -> String {
        self.events.iter().map(Event::name).collect::<Vec<_>>().join("|")
    }
}

/// Which quantity decides convergence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StopRule {
    /// Run the full budget.
    #[default]
    Budget,
    /// Euclidean distance to the problem's known saddle point.
    DistanceToSaddle,
    /// `‖(p, d)‖₂` of the last residual pair.
    ResidualNorm,
    /// Self-centered smoothed gap with the default smoothing.
    Gap,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_iters: usize,
    pub stop: StopRule,
    pub tol: f64,
    /// Evaluate the gap every this many iterations (0: only when stopping on it).
    pub gap_every: usize,
    pub trace: bool,
    /// Record wall-clock time; when false the time column is zero.
    pub record_time: bool,
    /// Wall-clock budget; the run stops unconverged once it is spent.
    pub max_seconds: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { max_iters: 10_000, stop: StopRule::Budget, tol: 1e-8, gap_every: 0, trace: false, record_time: true, max_seconds: None }
    }
}

impl RunOptions {
    pub fn new(max_iters: usize, stop: StopRule, tol: f64) -> Self {
        Self { max_iters, stop, tol, ..Self::default() }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub records: Vec<IterationRecord>,
    /// Number of iterations performed (passes for coordinate methods count
    /// `n` iterations each).
    pub iterations: usize,
    pub converged: bool,
    pub final_measure: Option<f64>,
    pub z: PrimalDualPoint,
    pub tau: f64,
    pub sigma: f64,
    pub step_changes: usize,
    pub rate_estimates: Vec<(usize, f64)>,
    pub gap_approximate: bool,
    pub elapsed_seconds: f64,
}

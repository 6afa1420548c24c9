use std::time::Instant;

use crate::error::{Error, Result};
use crate::gap::{self_centered_gap, GapParams};
use crate::linalg::PrimalDualPoint;
use crate::pdhg::{GoldsteinChange, GoldsteinState};
use crate::problem::SaddleProblem;
use crate::trace::{Event, IterationRecord};

use super::balance::{residual_balance_purecd, ResidualWindow};
use super::monitor::{monitor_update, MonitorDecision, MonitorState, RateModelKind, StatisticForm};
use super::sampling::SamplingConfig;
use super::solver::PureCd;
use super::steps::step_sizes_from_s;

/// How the step parameter `s` evolves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PureCdStrategy {
    #[default]
    Constant,
    ResidualBalance,
    Monitor(RateModelKind),
    /// Residual balance for a warm-up phase, then monitoring that compares the
    /// initial `s` with the balanced one.
    RbThenMonitor(RateModelKind),
}

impl PureCdStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PureCdStrategy::Constant => "constant",
            PureCdStrategy::ResidualBalance => "residual-balance",
            PureCdStrategy::Monitor(RateModelKind::Iid) => "monitor-iid",
            PureCdStrategy::Monitor(RateModelKind::Ar1) => "monitor-ar1",
            PureCdStrategy::RbThenMonitor(RateModelKind::Iid) => "rb-then-monitor",
            PureCdStrategy::RbThenMonitor(RateModelKind::Ar1) => "rb-then-monitor-ar1",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PureCdParams {
    pub strategy: PureCdStrategy,
    pub gamma: f64,
    /// Factor `r` between trusted and tentative values.
    pub ratio: f64,
    /// `δ`: target decrease per epoch, below `1/r`.
    pub shrink: f64,
    /// Residual-balance window length `W`.
    pub window: usize,
    pub goldstein: GoldsteinState,
    /// Passes of residual balance before monitoring starts.
    pub warmup_passes: usize,
    pub statistic: StatisticForm,
    pub c1: f64,
    pub c2: f64,
    pub max_iters: usize,
    /// Stop once the self-centered gap of the iterate is at most this.
    pub tol: f64,
    /// Sampling probabilities; uniform when `None`.
    pub probabilities: Option<Vec<f64>>,
    pub record_time: bool,
    /// Wall-clock budget; the run stops unconverged once it is spent.
    pub max_seconds: Option<f64>,
}

impl Default for PureCdParams {
    fn default() -> Self {
        Self {
            strategy: PureCdStrategy::Constant,
            gamma: 0.95,
            ratio: 2.0,
            shrink: 0.4,
            window: 50,
            goldstein: GoldsteinState::default(),
            warmup_passes: 20,
            statistic: StatisticForm::SumOfVariances,
            c1: 1.0,
            c2: 1.0,
            max_iters: 1_000_000,
            tol: 1e-10,
            probabilities: None,
            record_time: true,
            max_seconds: None,
        }
    }
}

impl PureCdParams {
    pub fn with_strategy(strategy: PureCdStrategy) -> Self {
        Self { strategy, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ratio > 1.0 && self.shrink > 0.0 && self.shrink * self.ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need r > 1 and 0 < δ < 1/r, got r = {}, δ = {}",
                self.ratio, self.shrink
            )));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::InvalidArgument("gap constants c1, c2 must be positive".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Summary of one epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub index: usize,
    /// Global iteration at which the epoch started.
    pub start_iter: usize,
    /// Iterations in the epoch (`k_l`).
    pub iterations: usize,
    pub s: f64,
    /// Target `ε_l` on the gap of the averaged iterate.
    pub epsilon: f64,
    /// Gap of the averaged iterate when the epoch ended.
    pub achieved_gap: f64,
    pub probability: Option<f64>,
    pub decision: Option<MonitorDecision>,
}

#[derive(Clone, Debug)]
pub struct PureCdRecord {
    /// One row per pass of `n` iterations.
    pub passes: Vec<IterationRecord>,
    pub epochs: Vec<EpochRecord>,
    pub iterations: usize,
    pub converged: bool,
    pub final_gap: f64,
    pub z: PrimalDualPoint,
    pub s: f64,
    pub s_changes: usize,
    pub gap_approximate: bool,
    pub estimates_biased: bool,
    pub elapsed_seconds: f64,
}

/// Prox step used to pull an iterate back into the domain.
const DOMAIN_STEP: f64 = 1e-12;

/// The dual extrapolation can leave the domain of `g*` (ball constraints,
/// boxes), where the gap is infinite. Measures are taken after a prox with a
/// negligible step on whichever part is outside its domain; feasible points
/// are unchanged.
fn into_domain(problem: &SaddleProblem, mut z: PrimalDualPoint) -> PrimalDualPoint {
    if !problem.gstar.value(&z.y).is_finite() {
        z.y = problem.gstar.prox(&z.y, DOMAIN_STEP);
    }
    if !problem.f.value(&z.x).is_finite() {
        z.x = problem.f.prox(&z.x, DOMAIN_STEP);
    }
    z
}

fn min_samples(kind: RateModelKind) -> usize {
    match kind {
        RateModelKind::Iid => 2,
        RateModelKind::Ar1 => 3,
    }
}

/// PURE-CD with epochs: within an epoch `s` is fixed; the epoch ends once the
/// self-centered gap of the running average, smoothed with
/// `(c1 s/k, c2/(k s))`, is below `ε_l` (and, while monitoring, once the
/// measure has dropped by `δ` with enough rate samples). Then
/// `ε_{l+1} = δ·gap` and the strategy may change `s`.
///
/// The measure `M` is the self-centered gap of the iterate with the default
/// smoothing, evaluated after every pass of `n` iterations.
pub fn adaptive_purecd(
    problem: &SaddleProblem,
    z0: PrimalDualPoint,
    s0: f64,
    params: &PureCdParams,
    seed: u64,
) -> Result<PureCdRecord> {
    params.validate()?;
    let start = Instant::now();
    let clock = |t: &Instant| if params.record_time { t.elapsed().as_secs_f64() } else { 0.0 };
    let n = problem.n();
    let sampling = SamplingConfig::for_problem(problem, params.probabilities.clone())?;
    let lips = problem.f2.as_ref().map_or_else(|| vec![0.0; n], |f2| f2.coordinate_lipschitz());
    let steps_for = |s: f64| step_sizes_from_s(&problem.a, &sampling, s, params.gamma, &lips);
    let mut s = s0;
    let mut cfg = steps_for(s)?;
    let beta = GapParams::default_for(problem);
    let z0_norm = z0.norm();
    let mut approximate = false;

    let z0_in = into_domain(problem, z0.clone());
    let m0 = self_centered_gap(problem, &z0_in, beta)?;
    approximate |= m0.approximate;
    let mut eps = self_centered_gap(problem, &z0_in, GapParams::new(params.c1 * s0, params.c2 / s0)?)?.value;
    let mut solver = PureCd::new(problem, z0, sampling.clone(), seed)?;

    let mut passes = vec![IterationRecord {
        iter: 0,
        time_seconds: 0.0,
        tau: s,
        sigma: f64::NAN,
        vnorm_diff: f64::NAN,
        primal_res_1: f64::NAN,
        dual_res_1: f64::NAN,
        gap: Some(m0.value),
        rate_estimate: None,
        distance: None,
        events: Vec::new(),
    }];
    let mut epochs = Vec::new();
    let mut converged = m0.value <= params.tol;
    if converged {
        passes[0].events.push(Event::Converged);
        epochs.push(EpochRecord {
            index: 0,
            start_iter: 0,
            iterations: 0,
            s,
            epsilon: eps,
            achieved_gap: m0.value,
            probability: None,
            decision: None,
        });
    }

    let model_kind = match params.strategy {
        PureCdStrategy::Monitor(k) | PureCdStrategy::RbThenMonitor(k) => Some(k),
        _ => None,
    };
    let mut monitor = match params.strategy {
        PureCdStrategy::Monitor(_) => Some(MonitorState::new(s0, params.ratio, params.shrink)?),
        _ => None,
    };
    let mut balance = match params.strategy {
        PureCdStrategy::ResidualBalance | PureCdStrategy::RbThenMonitor(_) => {
            Some((ResidualWindow::new(params.window), params.goldstein))
        }
        _ => None,
    };

    let mut m_prev = m0.value;
    let mut final_gap = m0.value;
    let mut epoch_start_iter = 0;
    let mut epoch_m_start = m0.value;
    let mut epoch_samples = 0;
    let mut last_sample_s: Option<f64> = None;
    let mut s_changes = 0;
    let mut pass_count = 0;

    let out_of_time = || params.max_seconds.is_some_and(|b| start.elapsed().as_secs_f64() >= b);
    while !converged && solver.iterations() < params.max_iters && !out_of_time() {
        let pass_len = n.min(params.max_iters - solver.iterations());
        let mut events = Vec::new();
        let mut s_changed = false;
        let (mut psum, mut dsum) = (0.0, 0.0);
        for _ in 0..pass_len {
            let up = solver.step(&cfg);
            psum += up.primal_sq;
            dsum += up.dual_sq;
            if let Some((window, g)) = balance.as_mut() {
                window.push(up.primal_sq, up.dual_sq);
                if window.is_full() {
                    let (s_new, g_new, change) = residual_balance_purecd(window, s, *g);
                    *g = g_new;
                    window.clear();
                    if change != GoldsteinChange::Unchanged {
                        s = s_new;
                        cfg = steps_for(s)?;
                        s_changes += 1;
                        s_changed = true;
                        events.push(match change {
                            GoldsteinChange::IncreasedTau => Event::BalanceDown,
                            _ => Event::BalanceUp,
                        });
                    }
                }
            }
        }
        pass_count += 1;

        let z = solver.point();
        let norm = z.norm();
        if !norm.is_finite() || norm > 1e12 * (1.0 + z0_norm) {
            return Err(Error::Diverged { iteration: solver.iterations(), norm });
        }
        let mv = self_centered_gap(problem, &into_domain(problem, z), beta)?;
        approximate |= mv.approximate;
        let m = mv.value;
        final_gap = m;

        let rate = (!s_changed && m_prev > 0.0 && m > 0.0 && m.is_finite() && m_prev.is_finite())
            .then(|| m / m_prev);
        match (monitor.as_mut(), rate) {
            (Some(mon), Some(r)) => {
                mon.record(s, r.ln(), last_sample_s == Some(s));
                epoch_samples += 1;
                last_sample_s = Some(s);
            }
            _ => last_sample_s = None,
        }
        m_prev = m;

        let k = pass_len as f64;
        let mut record = IterationRecord {
            iter: solver.iterations(),
            time_seconds: clock(&start),
            tau: s,
            sigma: f64::NAN,
            vnorm_diff: f64::NAN,
            primal_res_1: (psum / k).sqrt(),
            dual_res_1: (dsum / k).sqrt(),
            gap: Some(m),
            rate_estimate: rate,
            distance: None,
            events,
        };

        if m <= params.tol {
            converged = true;
            record.events.push(Event::Converged);
            passes.push(record);
            break;
        }

        let k_epoch = solver.average_count();
        if k_epoch > 0 {
            let kf = k_epoch as f64;
            let beta_av = GapParams::new(params.c1 * s / kf, params.c2 / (kf * s))?;
            let g_av = self_centered_gap(problem, &into_domain(problem, solver.average()), beta_av)?;
            approximate |= g_av.approximate;
            let monitor_ready = match (&monitor, model_kind) {
                (Some(_), Some(kind)) => {
                    m <= params.shrink * epoch_m_start && epoch_samples >= min_samples(kind)
                }
                _ => true,
            };
            if g_av.value <= eps && monitor_ready {
                record.events.push(Event::EpochEnd);
                let mut epoch = EpochRecord {
                    index: epochs.len(),
                    start_iter: epoch_start_iter,
                    iterations: k_epoch,
                    s,
                    epsilon: eps,
                    achieved_gap: g_av.value,
                    probability: None,
                    decision: None,
                };
                eps = if g_av.value > 0.0 { params.shrink * g_av.value } else { params.shrink * eps };
                if let (Some(mon), Some(kind)) = (monitor.take(), model_kind) {
                    let p = mon.probability(kind, params.statistic).unwrap_or(0.5);
                    let decision = MonitorDecision::from_probability(p);
                    record.events.push(match decision {
                        MonitorDecision::Accept => Event::MonitorAccept,
                        MonitorDecision::Reject => Event::MonitorReject,
                        MonitorDecision::Inconclusive => Event::MonitorInconclusive,
                    });
                    let next = monitor_update(mon, p);
                    if next.active != s {
                        record.events.push(if next.active > s { Event::StepUp } else { Event::StepDown });
                        s = next.active;
                        cfg = steps_for(s)?;
                        s_changes += 1;
                    }
                    epoch.probability = Some(p);
                    epoch.decision = Some(decision);
                    monitor = Some(next);
                }
                epochs.push(epoch);
                solver.reset_average();
                epoch_start_iter = solver.iterations();
                epoch_m_start = m;
                epoch_samples = 0;
                last_sample_s = None;
            }
        }

        if let (PureCdStrategy::RbThenMonitor(_), None) = (params.strategy, &monitor) {
            let exhausted = balance.as_ref().is_some_and(|(_, g)| !g.is_active());
            if pass_count >= params.warmup_passes || exhausted {
                balance = None;
                let same = (s - s0).abs() <= 1e-12 * s0;
                let tentative = if same { s0 * params.ratio } else { s };
                let mut mon = MonitorState::with_tentative(s0, tentative, params.ratio, params.shrink)?;
                mon.active = s;
                monitor = Some(mon);
                solver.reset_average();
                epoch_start_iter = solver.iterations();
                epoch_m_start = m;
                epoch_samples = 0;
                last_sample_s = None;
            }
        }
        record.tau = s;
        passes.push(record);
    }

    Ok(PureCdRecord {
        passes,
        epochs,
        iterations: solver.iterations(),
        converged,
        final_gap,
        z: solver.point(),
        s,
        s_changes,
        gap_approximate: approximate,
        estimates_biased: solver.estimates_biased(),
        elapsed_seconds: clock(&start),
    })
}

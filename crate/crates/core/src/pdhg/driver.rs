//! Generic PDHG loop with pluggable step-size policies.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::gap::{self_centered_gap, GapParams};
use crate::linalg::{v_norm, PrimalDualPoint, VNormWeights};
use crate::problem::SaddleProblem;
use crate::trace::{Event, IterationRecord, RunOptions, RunRecord, StopRule};

use super::goldstein::{goldstein_update, GoldsteinChange, GoldsteinState};
use super::iteration::{residuals_tripd, residuals_vc, tripd_step, vu_condat_step, ResidualPair};
use super::steps::{StepSizes, Variant};

/// Metric in which the given variant is nonexpansive.
pub fn variant_weights<'a>(
    problem: &'a SaddleProblem,
    variant: Variant,
    s: StepSizes,
) -> VNormWeights<'a> {
    match variant {
        Variant::VuCondat => VNormWeights::VuCondat { tau: s.tau, sigma: s.sigma, a: &problem.a },
        Variant::TriPd => VNormWeights::TriPd { tau: s.tau, sigma: s.sigma },
    }
}

/// Output of one iteration.
#[derive(Clone, Debug)]
pub struct PdhgStep {
    pub z_next: PrimalDualPoint,
    /// Point to which the residuals belong (`z_next` for Vũ-Condat).
    pub z_bar: PrimalDualPoint,
    pub residuals: ResidualPair,
}

pub fn pdhg_step(problem: &SaddleProblem, variant: Variant, z: &PrimalDualPoint, s: StepSizes) -> PdhgStep {
    match variant {
        Variant::VuCondat => {
            let z_next = vu_condat_step(problem, z, s);
            let residuals = residuals_vc(problem, z, &z_next, s);
            PdhgStep { z_bar: z_next.clone(), z_next, residuals }
        }
        Variant::TriPd => {
            let out = tripd_step(problem, z, s);
            let residuals = residuals_tripd(problem, z, &out, s);
            PdhgStep { z_next: out.z_next, z_bar: out.z_bar, residuals }
        }
    }
}

/// Everything a policy may look at after iteration `iteration` produced
/// `z_next` from `z_prev` with `steps`.
pub struct StepContext<'a> {
    pub iteration: usize,
    pub problem: &'a SaddleProblem,
    pub variant: Variant,
    pub z_prev: &'a PrimalDualPoint,
    pub z_next: &'a PrimalDualPoint,
    pub z_bar: &'a PrimalDualPoint,
    pub residuals: &'a ResidualPair,
    pub steps: StepSizes,
    /// `‖z_next − z_prev‖_V` in the metric of `steps`.
    pub vnorm_diff: f64,
}

#[derive(Clone, Debug)]
pub struct PolicyDecision {
    pub steps: StepSizes,
    pub events: Vec<Event>,
    pub rate_estimate: Option<f64>,
}

impl PolicyDecision {
    pub fn keep(steps: StepSizes) -> Self {
        Self { steps, events: Vec::new(), rate_estimate: None }
    }
}

pub trait StepPolicy {
    fn update(&mut self, ctx: &StepContext<'_>) -> Result<PolicyDecision>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConstantSteps;

impl StepPolicy for ConstantSteps {
    fn update(&mut self, ctx: &StepContext<'_>) -> Result<PolicyDecision> {
        Ok(PolicyDecision::keep(ctx.steps))
    }
}

/// Goldstein residual balancing applied once per iteration.
#[derive(Clone, Copy, Debug, Default)]
pub struct GoldsteinPolicy {
    pub state: GoldsteinState,
}

impl GoldsteinPolicy {
    pub fn new(state: GoldsteinState) -> Self {
        Self { state }
    }

    /// Applies one update; returns the new steps and the event, if any.
    /// With a smooth term, an increase of τ that would break admissibility
    /// is skipped.
    pub fn apply(&mut self, ctx: &StepContext<'_>) -> (StepSizes, Option<Event>) {
        let (s, g, change) = goldstein_update(ctx.residuals, ctx.steps, self.state);
        if change == GoldsteinChange::Unchanged {
            return (ctx.steps, None);
        }
        let lf = ctx.problem.smooth_lipschitz();
        if lf > 0.0 && !s.is_admissible(ctx.variant, ctx.problem.norm_a(), lf) {
            return (ctx.steps, None);
        }
        self.state = g;
        let event = match change {
            GoldsteinChange::IncreasedTau => Event::GoldsteinTauUp,
            _ => Event::GoldsteinTauDown,
        };
        (s, Some(event))
    }
}

impl StepPolicy for GoldsteinPolicy {
    fn update(&mut self, ctx: &StepContext<'_>) -> Result<PolicyDecision> {
        let (steps, event) = self.apply(ctx);
        Ok(PolicyDecision { steps, events: event.into_iter().collect(), rate_estimate: None })
    }
}

struct Measure<'p> {
    problem: &'p SaddleProblem,
    rule: StopRule,
    gap_params: GapParams,
    gap_every: usize,
    approximate: bool,
}

impl<'p> Measure<'p> {
    fn new(problem: &'p SaddleProblem, options: &RunOptions) -> Result<Self> {
        if options.stop == StopRule::DistanceToSaddle && problem.saddle.is_none() {
            return Err(Error::InvalidArgument(format!(
                "problem '{}' has no known saddle point to measure distance to",
                problem.name
            )));
        }
        let gap_every = match (options.stop, options.gap_every) {
            (StopRule::Gap, 0) => 1,
            (_, k) => k,
        };
        Ok(Self {
            problem,
            rule: options.stop,
            gap_params: GapParams::default_for(problem),
            gap_every,
            approximate: false,
        })
    }

    fn gap(&mut self, iteration: usize, z: &PrimalDualPoint) -> Result<Option<f64>> {
        if self.gap_every == 0 || iteration % self.gap_every != 0 {
            return Ok(None);
        }
        let g = self_centered_gap(self.problem, z, self.gap_params)?;
        self.approximate |= g.approximate;
        Ok(Some(g.value))
    }

    fn distance(&self, z: &PrimalDualPoint) -> Option<f64> {
        self.problem.saddle.as_ref().map(|s| z.distance(s))
    }

    fn stop_value(&self, gap: Option<f64>, distance: Option<f64>, residual: Option<f64>) -> Option<f64> {
        match self.rule {
            StopRule::Budget => None,
            StopRule::DistanceToSaddle => distance,
            StopRule::ResidualNorm => residual,
            StopRule::Gap => gap,
        }
    }
}

/// Runs PDHG from `z0` with initial steps `s0`, letting `policy` adapt the
/// steps after every iteration.
pub fn run_pdhg(
    problem: &SaddleProblem,
    variant: Variant,
    z0: &PrimalDualPoint,
    s0: StepSizes,
    policy: &mut dyn StepPolicy,
    options: &RunOptions,
) -> Result<RunRecord> {
    z0.check_dims(problem.n(), problem.m())?;
    s0.check(variant, problem.norm_a(), problem.smooth_lipschitz())?;
    let start = Instant::now();
    let clock = || if options.record_time { start.elapsed().as_secs_f64() } else { 0.0 };
    let mut measure = Measure::new(problem, options)?;
    let blowup = 1e12 * (1.0 + z0.norm());

    let mut z = z0.clone();
    let mut s = s0;
    let mut records = Vec::new();
    let mut rate_estimates = Vec::new();
    let mut step_changes = 0;
    let mut converged = false;
    let mut final_measure = None;
    let mut iterations = 0;

    // Stop immediately when the starting point already meets the tolerance.
    if matches!(options.stop, StopRule::DistanceToSaddle | StopRule::Gap) {
        let initial = match options.stop {
            StopRule::DistanceToSaddle => measure.distance(&z),
            _ => Some(self_centered_gap(problem, &z, measure.gap_params)?.value),
        };
        if let Some(v) = initial {
            final_measure = Some(v);
            converged = v <= options.tol;
        }
    }

    let out_of_time = || options.max_seconds.is_some_and(|b| start.elapsed().as_secs_f64() >= b);
    while !converged && iterations < options.max_iters && !out_of_time() {
        let step = pdhg_step(problem, variant, &z, s);
        iterations += 1;
        let k = iterations;
        let diff = step.z_next.diff(&z);
        let vnorm_diff = v_norm(&diff, &variant_weights(problem, variant, s))?;
        let znorm = step.z_next.norm();
        if !znorm.is_finite() || znorm > blowup {
            return Err(Error::Diverged { iteration: k, norm: znorm });
        }

        let gap = measure.gap(k, &step.z_next)?;
        let distance = measure.distance(&step.z_next);
        let value = measure.stop_value(gap, distance, Some(step.residuals.norm()));
        if value.is_some() {
            final_measure = value;
        }
        converged = value.is_some_and(|v| v <= options.tol);

        let mut events = Vec::new();
        let mut rate_estimate = None;
        let used = s;
        if !converged {
            let ctx = StepContext {
                iteration: k,
                problem,
                variant,
                z_prev: &z,
                z_next: &step.z_next,
                z_bar: &step.z_bar,
                residuals: &step.residuals,
                steps: s,
                vnorm_diff,
            };
            let decision = policy.update(&ctx)?;
            if decision.steps != s {
                step_changes += 1;
            }
            s = decision.steps;
            events = decision.events;
            rate_estimate = decision.rate_estimate;
            if let Some(r) = rate_estimate {
                rate_estimates.push((k, r));
            }
        } else {
            events.push(Event::Converged);
        }

        if options.trace {
            records.push(IterationRecord {
                iter: k,
                time_seconds: clock(),
                tau: used.tau,
                sigma: used.sigma,
                vnorm_diff,
                primal_res_1: step.residuals.p_norm1,
                dual_res_1: step.residuals.d_norm1,
                gap,
                rate_estimate,
                distance,
                events,
            });
        }
        z = step.z_next;
    }

    Ok(RunRecord {
        records,
        iterations,
        converged,
        final_measure,
        z,
        tau: s.tau,
        sigma: s.sigma,
        step_changes,
        rate_estimates,
        gap_approximate: measure.approximate,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

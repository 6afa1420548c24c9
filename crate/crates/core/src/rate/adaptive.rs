//! Step-size search driven by rate estimates, with Goldstein warm-up.

use crate::error::{Error, Result};
use crate::linalg::PrimalDualPoint;
use crate::pdhg::{run_pdhg, GoldsteinPolicy, GoldsteinState, PolicyDecision, StepContext, StepPolicy, StepSizes, Variant};
use crate::problem::SaddleProblem;
use crate::trace::{Event, RunOptions, RunRecord};

use super::estimator::{estimate_rate, CycleTrace, EstimatorParams, RateEstimate};

/// How the direction of the next step change is chosen.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum DirectionPolicy {
    /// Keep the direction while estimates improve, revert when the new
    /// estimate is worse than the previous one.
    #[default]
    Compare,
    /// Directions taken from a fixed script, cycled. Used to exercise the
    /// gating safeguard independently of the comparison.
    Scripted(Vec<i32>),
}

#[derive(Clone, Debug)]
pub struct RateDriverParams {
    pub ratio: f64,
    pub estimator: EstimatorParams,
    pub goldstein: GoldsteinState,
    pub initial_direction: i32,
    pub direction: DirectionPolicy,
}

impl Default for RateDriverParams {
    fn default() -> Self {
        Self {
            ratio: 1.5,
            estimator: EstimatorParams::default(),
            goldstein: GoldsteinState::default(),
            initial_direction: 1,
            direction: DirectionPolicy::Compare,
        }
    }
}

impl RateDriverParams {
    /// Rate-based search alone.
    pub fn without_goldstein() -> Self {
        Self { goldstein: GoldsteinState::disabled(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.estimator.delta;
        if !(self.ratio > 1.0) || !(d > 0.0 && d < 1.0) || d * self.ratio >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "rate driver needs r > 1, δ in (0,1) and δ·r < 1 (r={}, δ={d})",
                self.ratio
            )));
        }
        if self.initial_direction.abs() != 1 {
            return Err(Error::InvalidArgument("initial direction must be ±1".into()));
        }
        if let DirectionPolicy::Scripted(s) = &self.direction {
            if s.is_empty() || s.iter().any(|u| u.abs() != 1) {
                return Err(Error::InvalidArgument("scripted directions must be a non-empty list of ±1".into()));
            }
        }
        Ok(())
    }
}

/// Step policy of the combined driver.
#[derive(Clone, Debug)]
pub struct RatePolicy {
    params: RateDriverParams,
    goldstein: GoldsteinPolicy,
    trace: CycleTrace,
    direction: i32,
    previous: Option<RateEstimate>,
    script_pos: usize,
    pub estimates: Vec<RateEstimate>,
}

impl RatePolicy {
    pub fn new(params: RateDriverParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            goldstein: GoldsteinPolicy::new(params.goldstein),
            direction: params.initial_direction,
            params,
            trace: CycleTrace::new(0, None),
            previous: None,
            script_pos: 0,
            estimates: Vec::new(),
        })
    }

    pub fn direction(&self) -> i32 {
        self.direction
    }

    fn next_direction(&mut self, estimate: &RateEstimate) -> bool {
        match &self.params.direction {
            DirectionPolicy::Compare => {
                let worse = self.previous.is_some_and(|p| estimate.value > p.value);
                if worse {
                    self.direction = -self.direction;
                }
                worse
            }
            DirectionPolicy::Scripted(script) => {
                let u = script[self.script_pos % script.len()];
                self.script_pos += 1;
                let flipped = u != self.direction;
                self.direction = u;
                flipped
            }
        }
    }
}

fn iterate_scale(ctx: &StepContext<'_>) -> f64 {
    let z = ctx.z_next;
    let xx: f64 = z.x.iter().map(|v| v * v).sum();
    let yy: f64 = z.y.iter().map(|v| v * v).sum();
    (xx / ctx.steps.tau + yy / ctx.steps.sigma).sqrt()
}

impl StepPolicy for RatePolicy {
    fn update(&mut self, ctx: &StepContext<'_>) -> Result<PolicyDecision> {
        let (steps, event) = self.goldstein.apply(ctx);
        if let Some(e) = event {
            self.trace = CycleTrace::new(ctx.iteration, Some(ctx.vnorm_diff));
            return Ok(PolicyDecision { steps, events: vec![e], rate_estimate: None });
        }
        self.trace.push(ctx.iteration, ctx.vnorm_diff, iterate_scale(ctx));
        let Some(estimate) = estimate_rate(&self.trace, self.params.estimator) else {
            return Ok(PolicyDecision::keep(ctx.steps));
        };
        let mut events = vec![Event::RateEstimate];
        if self.next_direction(&estimate) {
            events.push(Event::Revert);
        }
        self.previous = Some(estimate);
        self.estimates.push(estimate);
        let steps: StepSizes = ctx.steps.rescaled(self.params.ratio, self.direction);
        events.push(if self.direction > 0 { Event::StepUp } else { Event::StepDown });
        self.trace = CycleTrace::new(ctx.iteration, Some(ctx.vnorm_diff));
        Ok(PolicyDecision { steps, events, rate_estimate: Some(estimate.value) })
    }
}

/// Runs PDHG with the combined Goldstein / rate-estimate step-size driver.
pub fn adaptive_pdhg(
    problem: &SaddleProblem,
    variant: Variant,
    z0: &PrimalDualPoint,
    s0: StepSizes,
    params: RateDriverParams,
    options: &RunOptions,
) -> Result<RunRecord> {
    let mut policy = RatePolicy::new(params)?;
    run_pdhg(problem, variant, z0, s0, &mut policy, options)
}

//! Running one configured experiment.

use std::fmt;

use anyhow::Result;
use pdadapt::gap::{self_centered_gap, GapParams};
use pdadapt::linalg::PrimalDualPoint;
use pdadapt::pdhg::{run_pdhg, ConstantSteps, GoldsteinPolicy, StepSizes, Variant};
use pdadapt::problem::SaddleProblem;
use pdadapt::purecd::{adaptive_purecd, PureCdParams, PureCdStrategy, RateModelKind};
use pdadapt::rate::{adaptive_pdhg, RateDriverParams};
use pdadapt::trace::{RunOptions, StopRule};

use crate::config::{Algorithm, Measure, ProblemKind, ProblemSpec, RunConfig, Strategy};
use crate::problems::{build_problem, load_image};
use crate::trace::{rows_from_records, TraceRow};

/// Fraction of the admissible region used by default PDHG steps.
const DEFAULT_STEP_FRACTION: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIters,
    TimeBudget,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::MaxIters => "max-iters",
            StopReason::TimeBudget => "time-budget",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            StopReason::Tolerance => 0,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub problem: String,
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub seed: u64,
    pub measure: Measure,
    pub tol: f64,
    pub stop_reason: StopReason,
    pub iterations: usize,
    /// Iterations at which the tolerance was met, if it was.
    pub iterations_to_tol: Option<usize>,
    pub final_measure: Option<f64>,
    pub final_gap: f64,
    pub time_seconds: f64,
    pub final_tau: f64,
    pub final_sigma: f64,
    pub step_changes: usize,
    pub gap_approximate: bool,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v:e}"));
        writeln!(f, "problem={}", self.problem)?;
        writeln!(f, "algorithm={}", self.algorithm)?;
        writeln!(f, "strategy={}", self.strategy)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "measure={}", self.measure)?;
        writeln!(f, "tol={:e}", self.tol)?;
        writeln!(f, "stop_reason={}", self.stop_reason.as_str())?;
        writeln!(f, "iterations={}", self.iterations)?;
        writeln!(f, "iterations_to_tol={}", self.iterations_to_tol.map_or("none".to_string(), |k| k.to_string()))?;
        writeln!(f, "final_measure={}", opt(self.final_measure))?;
        writeln!(f, "final_gap={:e}", self.final_gap)?;
        writeln!(f, "time_seconds={}", self.time_seconds)?;
        if self.algorithm == Algorithm::Purecd {
            writeln!(f, "final_s={:e}", self.final_tau)?;
        } else {
            writeln!(f, "final_tau={:e}", self.final_tau)?;
            writeln!(f, "final_sigma={:e}", self.final_sigma)?;
        }
        writeln!(f, "step_changes={}", self.step_changes)?;
        write!(f, "gap_approximate={}", self.gap_approximate)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<TraceRow>,
    pub summary: Summary,
    pub z: PrimalDualPoint,
}

/// Ones for the toy problem, the observed image for TV problems, zero
/// otherwise.
pub fn starting_point(spec: &ProblemSpec, problem: &SaddleProblem) -> Result<PrimalDualPoint> {
    let (n, m) = (problem.n(), problem.m());
    Ok(match spec.kind {
        ProblemKind::Toy => PrimalDualPoint::new(vec![1.0; n], vec![1.0; m]),
        ProblemKind::TvL1 | ProblemKind::TvL2 => PrimalDualPoint::new(load_image(spec)?.pixels, vec![0.0; m]),
        _ => PrimalDualPoint::zeros(n, m),
    })
}

/// Steps with `στ‖A‖² + τL/2` at [`DEFAULT_STEP_FRACTION`], filling in
/// whichever of `τ₀`, `σ₀` is missing.
pub fn default_steps(tau0: Option<f64>, sigma0: Option<f64>, norm_a: f64, lipschitz: f64) -> Result<StepSizes> {
    let c = DEFAULT_STEP_FRACTION;
    let na2 = norm_a * norm_a;
    let (tau, sigma) = match (tau0, sigma0) {
        (Some(t), Some(s)) => (t, s),
        (Some(t), None) => (t, (c - 0.5 * t * lipschitz).max(0.0) / (t * na2)),
        (None, Some(s)) => (c / (s * na2 + 0.5 * lipschitz), s),
        (None, None) => {
            // τ = σ = t with t²‖A‖² + tL/2 = c.
            let b = 0.5 * lipschitz;
            let t = (-b + (b * b + 4.0 * na2 * c).sqrt()) / (2.0 * na2);
            (t, t)
        }
    };
    Ok(StepSizes::new(tau, sigma)?)
}

fn stop_rule(m: Measure) -> StopRule {
    match m {
        Measure::Gap => StopRule::Gap,
        Measure::Distance => StopRule::DistanceToSaddle,
        Measure::Residual => StopRule::ResidualNorm,
    }
}

fn stop_reason(converged: bool, iterations: usize, max_iters: usize) -> StopReason {
    if converged {
        StopReason::Tolerance
    } else if iterations >= max_iters {
        StopReason::MaxIters
    } else {
        StopReason::TimeBudget
    }
}

pub fn run_experiment(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let problem = build_problem(&config.problem)?;
    let z0 = starting_point(&config.problem, &problem)?;
    match config.algorithm {
        Algorithm::Purecd => run_purecd(config, &problem, z0),
        Algorithm::PdhgVc => run_deterministic(config, &problem, z0, Variant::VuCondat),
        Algorithm::PdhgTripd => run_deterministic(config, &problem, z0, Variant::TriPd),
    }
}

fn run_deterministic(config: &RunConfig, problem: &SaddleProblem, z0: PrimalDualPoint, variant: Variant) -> Result<RunOutcome> {
    let s0 = default_steps(config.tau0, config.sigma0, problem.norm_a(), problem.smooth_lipschitz())?;
    let cadence = config.cadence(problem.n());
    let options = RunOptions {
        max_iters: config.max_iters,
        stop: stop_rule(config.measure),
        tol: config.tol,
        gap_every: cadence,
        trace: true,
        record_time: config.record_time,
        max_seconds: config.time_budget,
    };
    let run = match config.strategy {
        Strategy::Constant => run_pdhg(problem, variant, &z0, s0, &mut ConstantSteps, &options)?,
        Strategy::Goldstein => run_pdhg(problem, variant, &z0, s0, &mut GoldsteinPolicy::default(), &options)?,
        Strategy::Rate => adaptive_pdhg(problem, variant, &z0, s0, RateDriverParams::without_goldstein(), &options)?,
        Strategy::Combined => adaptive_pdhg(problem, variant, &z0, s0, RateDriverParams::default(), &options)?,
        other => unreachable!("{other} rejected by validation"),
    };
    let mut steps_after: Vec<(f64, f64)> = run.records.iter().skip(1).map(|r| (r.tau, r.sigma)).collect();
    steps_after.push((run.tau, run.sigma));
    let rows = rows_from_records(&run.records, &steps_after, cadence);
    let final_gap = self_centered_gap(problem, &run.z, GapParams::default_for(problem))?;
    let summary = Summary {
        problem: problem.name.clone(),
        algorithm: config.algorithm,
        strategy: config.strategy,
        seed: config.seed,
        measure: config.measure,
        tol: config.tol,
        stop_reason: stop_reason(run.converged, run.iterations, config.max_iters),
        iterations: run.iterations,
        iterations_to_tol: run.converged.then_some(run.iterations),
        final_measure: run.final_measure,
        final_gap: final_gap.value,
        time_seconds: run.elapsed_seconds,
        final_tau: run.tau,
        final_sigma: run.sigma,
        step_changes: run.step_changes,
        gap_approximate: run.gap_approximate || final_gap.approximate,
    };
    Ok(RunOutcome { rows, summary, z: run.z })
}

fn purecd_strategy(s: Strategy) -> PureCdStrategy {
    match s {
        Strategy::Constant => PureCdStrategy::Constant,
        Strategy::ResidualBalance => PureCdStrategy::ResidualBalance,
        Strategy::MonitorIid => PureCdStrategy::Monitor(RateModelKind::Iid),
        Strategy::MonitorAr1 => PureCdStrategy::Monitor(RateModelKind::Ar1),
        Strategy::RbThenMonitor => PureCdStrategy::RbThenMonitor(RateModelKind::Iid),
        other => unreachable!("{other} rejected by validation"),
    }
}

fn run_purecd(config: &RunConfig, problem: &SaddleProblem, z0: PrimalDualPoint) -> Result<RunOutcome> {
    let params = PureCdParams {
        tol: config.tol,
        max_iters: config.max_iters,
        record_time: config.record_time,
        max_seconds: config.time_budget,
        ..PureCdParams::with_strategy(purecd_strategy(config.strategy))
    };
    let rec = adaptive_purecd(problem, z0, config.s0.unwrap_or(1.0), &params, config.seed)?;
    let steps_after: Vec<(f64, f64)> = rec.passes.iter().map(|r| (r.tau, r.sigma)).collect();
    let rows = rows_from_records(&rec.passes, &steps_after, config.cadence(problem.n()));
    let summary = Summary {
        problem: problem.name.clone(),
        algorithm: config.algorithm,
        strategy: config.strategy,
        seed: config.seed,
        measure: config.measure,
        tol: config.tol,
        stop_reason: stop_reason(rec.converged, rec.iterations, config.max_iters),
        iterations: rec.iterations,
        iterations_to_tol: rec.converged.then_some(rec.iterations),
        final_measure: Some(rec.final_gap),
        final_gap: rec.final_gap,
        time_seconds: rec.elapsed_seconds,
        final_tau: rec.s,
        final_sigma: f64::NAN,
        step_changes: rec.s_changes,
        gap_approximate: rec.gap_approximate,
    };
    Ok(RunOutcome { rows, summary, z: rec.z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_steps_sit_inside_the_admissible_region() {
        for (t, s, na, l) in [(None, None, 2.0, 0.0), (None, None, 1.5, 3.0), (Some(0.1), None, 2.0, 1.0), (None, Some(0.3), 2.0, 1.0)] {
            let st = default_steps(t, s, na, l).unwrap();
            let v = st.product() * na * na + 0.5 * st.tau * l;
            assert!(v < 1.0);
            if t.is_none() && s.is_none() {
                assert!((v - DEFAULT_STEP_FRACTION).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stop_reasons_map_to_exit_codes() {
        assert_eq!(stop_reason(true, 10, 10).exit_code(), 0);
        assert_eq!(stop_reason(false, 10, 10), StopReason::MaxIters);
        assert_eq!(stop_reason(false, 3, 10), StopReason::TimeBudget);
        assert_eq!(StopReason::TimeBudget.exit_code(), 2);
    }
}

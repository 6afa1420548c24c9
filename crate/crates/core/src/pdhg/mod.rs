//! Deterministic primal-dual hybrid gradient: Vũ-Condat and Tri-PD
//! iterations, residuals, Goldstein adaptation and the run loop.

mod driver;
mod goldstein;
mod iteration;
mod steps;

pub use driver::{
    pdhg_step, run_pdhg, variant_weights, ConstantSteps, GoldsteinPolicy, PdhgStep, PolicyDecision,
    StepContext, StepPolicy,
};
pub use goldstein::{goldstein_update, goldstein_update_norms, GoldsteinChange, GoldsteinState};
pub use iteration::{residuals_tripd, residuals_vc, tripd_step, vu_condat_step, ResidualPair, TriPdOutput};
pub use steps::{oracle_step_sizes, StepSizes, Variant};

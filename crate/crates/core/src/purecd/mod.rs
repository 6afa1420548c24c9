//! Randomized primal-dual coordinate descent with random extrapolation,
//! stochastic residual estimates, residual balancing and statistical
//! monitoring of the observed convergence rate.

mod adaptive;
mod balance;
mod monitor;
mod sampling;
mod solver;
mod steps;

pub use adaptive::{adaptive_purecd, EpochRecord, PureCdParams, PureCdRecord, PureCdStrategy};
pub use balance::{residual_balance_purecd, ResidualWindow};
pub use monitor::{
    ar1_fit, ar1_fit_segments, compare_rates, iid_fit, instant_rate, monitor_update, MonitorDecision,
    MonitorState, RateModel, RateModelKind, RatePool, StatisticForm, AR1_CLAMP,
};
pub use sampling::{derive_sampling, derive_sampling_blocked, SamplingConfig};
pub use solver::{
    purecd_step, purecd_step_at, stochastic_residuals, CoordinateUpdate, PureCd, PureCdStep,
    StochasticResiduals, REFRESH_EVERY,
};
pub use steps::{step_sizes_from_s, PureCdStepConfig};

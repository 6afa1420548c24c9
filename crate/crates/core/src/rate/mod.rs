//! Quadratic fixed-point analysis, spectral-radius estimation from iterate
//! differences, and the rate-driven step-size search for PDHG.

mod adaptive;
mod estimator;
mod fixed_point;

pub use adaptive::{adaptive_pdhg, DirectionPolicy, RateDriverParams, RatePolicy};
pub use estimator::{
    detect_extrema, estimate_rate, CycleTrace, EstimatorParams, RateEstimate, RateKind, NOISE_FLOOR,
};
pub use fixed_point::{build_fixed_point_map, spectral_radius_dense, FixedPointMap};

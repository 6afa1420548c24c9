//! Saddle-point problems, proximal and smooth oracles, instance builders and
//! data readers.

mod builders;
mod image;
mod libsvm;
pub mod prox;
mod saddle;
pub mod smooth;

pub use builders::{
    build_reg_least_squares, build_sparse_svm, build_sqrt_lasso, build_toy_quadratic, build_tv_l1,
    build_tv_l2, sqrt_lasso_default_lambda, QuadraticData, TvFidelity, TV_L1_DEFAULT_LAMBDA,
};
pub use image::{discrete_gradient_2d, parse_image, read_image, Image};
pub use libsvm::{parse_libsvm, read_libsvm};
pub use prox::{ProxOracle, Steps};
pub use saddle::SaddleProblem;
pub use smooth::SmoothOracle;

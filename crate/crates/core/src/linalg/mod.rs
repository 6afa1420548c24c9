//! Sparse kernels, primal-dual points and the step-size dependent V-norms.

mod mmio;
mod point;
mod sparse;
pub mod vec;
mod vnorm;

pub use mmio::{parse_matrix_market, read_matrix_market};
pub use point::PrimalDualPoint;
pub use sparse::SparseMatrix;
pub use vnorm::{v_norm, VNormWeights};

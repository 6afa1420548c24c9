//! Problem instances from a [`ProblemSpec`].

use anyhow::{Context, Result};
use pdadapt::linalg::SparseMatrix;
use pdadapt::problem::{
    build_reg_least_squares, build_sparse_svm, build_sqrt_lasso, build_toy_quadratic, build_tv_l1, build_tv_l2,
    read_image, read_libsvm, sqrt_lasso_default_lambda, Image, SaddleProblem, TvFidelity, TV_L1_DEFAULT_LAMBDA,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ProblemKind, ProblemSpec};

pub const LEAST_SQUARES_DEFAULT_LAMBDA: f64 = 1e-3;
pub const TV_L2_DEFAULT_LAMBDA: f64 = 10.0;

/// Sparse random matrix with entries uniform in `[-1, 1]`; every row and
/// column gets at least one entry.
pub fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if i % cols == j || j % rows == i || rng.random_bool(density) {
                triplets.push((i, j, rng.random_range(-1.0..1.0)));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &triplets).expect("indices in range")
}

/// `b = A x♮ + noise` for a random sparse `x♮`.
pub fn synthetic_regression(rows: usize, cols: usize, seed: u64) -> (SparseMatrix, Vec<f64>) {
    let a = random_sparse(rows, cols, 0.2, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let x: Vec<f64> = (0..cols).map(|j| if j % 3 == 0 { rng.random_range(-1.0..1.0) } else { 0.0 }).collect();
    let mut b = a.spmv(&x).expect("dimensions agree");
    for v in &mut b {
        *v += 0.05 * rng.random_range(-1.0..1.0);
    }
    (a, b)
}

/// Labels from a random hyperplane, with a few flipped.
pub fn synthetic_classification(rows: usize, cols: usize, seed: u64) -> (SparseMatrix, Vec<f64>) {
    let a = random_sparse(rows, cols, 0.3, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1a55);
    let w: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    let score = a.spmv(&w).expect("dimensions agree");
    let labels = score
        .iter()
        .map(|&s| {
            let l = if s >= 0.0 { 1.0 } else { -1.0 };
            if rng.random_bool(0.1) { -l } else { l }
        })
        .collect();
    (a, labels)
}

fn matrix_data(spec: &ProblemSpec, synthetic: fn(usize, usize, u64) -> (SparseMatrix, Vec<f64>)) -> Result<(SparseMatrix, Vec<f64>)> {
    match &spec.data {
        Some(path) => read_libsvm(path).with_context(|| format!("reading data {}", path.display())),
        None => Ok(synthetic(spec.rows, spec.cols, spec.data_seed)),
    }
}

pub fn load_image(spec: &ProblemSpec) -> Result<Image> {
    match &spec.image {
        Some(path) => read_image(path).with_context(|| format!("reading image {}", path.display())),
        None => Ok(Image::synthetic(spec.size, spec.size, spec.noise, spec.data_seed)),
    }
}

pub fn build_problem(spec: &ProblemSpec) -> Result<SaddleProblem> {
    let p = match spec.kind {
        ProblemKind::Toy => build_toy_quadratic(spec.n, spec.mu_x, spec.mu_y, spec.eta)?,
        ProblemKind::LeastSquares => {
            let (a, b) = matrix_data(spec, synthetic_regression)?;
            build_reg_least_squares(a, b, spec.lambda.unwrap_or(LEAST_SQUARES_DEFAULT_LAMBDA))?
        }
        ProblemKind::Svm => {
            let (a, labels) = matrix_data(spec, synthetic_classification)?;
            build_sparse_svm(a, &labels)?
        }
        ProblemKind::TvL1 => build_tv_l1(&load_image(spec)?, spec.lambda.unwrap_or(TV_L1_DEFAULT_LAMBDA))?,
        ProblemKind::TvL2 => {
            build_tv_l2(&load_image(spec)?, spec.lambda.unwrap_or(TV_L2_DEFAULT_LAMBDA), TvFidelity::Smooth)?
        }
        ProblemKind::SqrtLasso => {
            let (a, b) = matrix_data(spec, synthetic_regression)?;
            let lambda = match spec.lambda {
                Some(l) => l,
                None => sqrt_lasso_default_lambda(&a, &b)?,
            };
            build_sqrt_lasso(a, b, lambda)?
        }
    };
    Ok(p)
}

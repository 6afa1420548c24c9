//! Benchmark problem instances.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::vec::{norm2, norm_inf};
use crate::linalg::{PrimalDualPoint, SparseMatrix};

use super::image::{discrete_gradient_2d, Image};
use super::prox::{
    BallIndicator, BlockLayout, Conjugate, GroupL2, HingeConjugate, QuadraticProx, SquaredL2, Zero, L1,
};
use super::saddle::SaddleProblem;
use super::smooth::{Quadratic, SeparableQuadratic};

pub const TV_L1_DEFAULT_LAMBDA: f64 = 1.9;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")))
    }
}

fn dense_to_sparse(m: &DMatrix<f64>) -> SparseMatrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    SparseMatrix::from_dense(&rows).expect("rectangular by construction")
}

/// `(μx/2)‖x‖² + ⟨Ax, y⟩ − (μy/2)‖y‖²` where row `i` of `A` is
/// `(1+η) e_i − e_{i+1}`, indices taken cyclically.
pub fn build_toy_quadratic(n: usize, mu_x: f64, mu_y: f64, eta: f64) -> Result<SaddleProblem> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("toy problem needs n ≥ 2, got {n}")));
    }
    let mut triplets = Vec::with_capacity(2 * n);
    for i in 0..n {
        triplets.push((i, i, 1.0 + eta));
        triplets.push((i, (i + 1) % n, -1.0));
    }
    let a = SparseMatrix::from_triplets(n, n, &triplets)?;
    SaddleProblem::new(
        "toy",
        a,
        Box::new(SquaredL2::new(n, mu_x)),
        None,
        Box::new(SquaredL2::new(n, mu_y)),
    )?
    .with_strong_convexity(Some(mu_x), Some(mu_y))?
    .with_saddle(PrimalDualPoint::zeros(n, n))
}

/// `½‖Ax − b‖² + λ/(2n)‖x‖²` with `n` the number of columns of `A`.
pub fn build_reg_least_squares(a: SparseMatrix, b: Vec<f64>, lambda: f64) -> Result<SaddleProblem> {
    check_lambda(lambda)?;
    check_len("least-squares right-hand side", a.rows(), b.len())?;
    let (m, n) = (a.rows(), a.cols());
    let weight = lambda / n as f64;
    let saddle = if n <= 500 { least_squares_saddle(&a, &b, weight) } else { None };
    let mut p = SaddleProblem::new(
        "least-squares",
        a,
        Box::new(SquaredL2::new(n, weight)),
        None,
        Box::new(Conjugate::new(SquaredL2::centered(1.0, b))),
    )?
    .with_strong_convexity(Some(weight), Some(1.0))?;
    if let Some(z) = saddle {
        debug_assert_eq!(z.y.len(), m);
        p = p.with_saddle(z)?;
    }
    Ok(p)
}

fn least_squares_saddle(a: &SparseMatrix, b: &[f64], weight: f64) -> Option<PrimalDualPoint> {
    let ad = DMatrix::from_row_slice(a.rows(), a.cols(), &a.to_dense().concat());
    let bv = DVector::from_column_slice(b);
    let mut normal = ad.transpose() * &ad;
    for i in 0..a.cols() {
        normal[(i, i)] += weight;
    }
    let x = normal.cholesky()?.solve(&(ad.transpose() * &bv));
    let y = &ad * &x - bv;
    Some(PrimalDualPoint::new(x.as_slice().to_vec(), y.as_slice().to_vec()))
}

/// `Σ_i max(0, 1 − y_i a_iᵀw) + ‖w‖₁` with labels folded into the rows.
pub fn build_sparse_svm(a: SparseMatrix, labels: &[f64]) -> Result<SaddleProblem> {
    check_len("SVM labels", a.rows(), labels.len())?;
    let mut a = a;
    a.scale_rows(labels)?;
    let (m, n) = (a.rows(), a.cols());
    SaddleProblem::new(
        "svm",
        a,
        Box::new(L1::new(n, 1.0)),
        None,
        Box::new(HingeConjugate { dim: m }),
    )
}

/// `λ‖x − I‖₁ + ‖Dx‖_{2,1}`.
pub fn build_tv_l1(image: &Image, lambda: f64) -> Result<SaddleProblem> {
    check_lambda(lambda)?;
    let d = discrete_gradient_2d(image.height, image.width);
    let m = d.rows();
    SaddleProblem::new(
        "tv-l1",
        d,
        Box::new(L1::centered(lambda, image.pixels.clone())),
        None,
        Box::new(tv_dual(m)),
    )
}

fn tv_dual(m: usize) -> BallIndicator {
    BallIndicator { dim: m, radius: 1.0, layout: BlockLayout::Uniform(2), center: None }
}

/// How the fidelity term of TV-L2 enters the problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TvFidelity {
    /// As the smooth term `f₂`.
    #[default]
    Smooth,
    /// As the proximable term `f`.
    Prox,
}

/// `λ‖x − I‖² + ‖Dx‖_{2,1}`.
pub fn build_tv_l2(image: &Image, lambda: f64, fidelity: TvFidelity) -> Result<SaddleProblem> {
    check_lambda(lambda)?;
    let d = discrete_gradient_2d(image.height, image.width);
    let (m, n) = (d.rows(), d.cols());
    let weight = 2.0 * lambda;
    let center = image.pixels.clone();
    let p = match fidelity {
        TvFidelity::Smooth => SaddleProblem::new(
            "tv-l2",
            d,
            Box::new(Zero { dim: n }),
            Some(Box::new(SeparableQuadratic::new(weight, center))),
            Box::new(tv_dual(m)),
        )?,
        TvFidelity::Prox => SaddleProblem::new(
            "tv-l2",
            d,
            Box::new(SquaredL2::centered(weight, center)),
            None,
            Box::new(tv_dual(m)),
        )?,
    };
    p.with_strong_convexity(Some(weight), None)
}

/// `‖Ax − b‖₂ + λ‖x‖₁`.
pub fn build_sqrt_lasso(a: SparseMatrix, b: Vec<f64>, lambda: f64) -> Result<SaddleProblem> {
    check_lambda(lambda)?;
    check_len("square-root lasso right-hand side", a.rows(), b.len())?;
    let (m, n) = (a.rows(), a.cols());
    let g = GroupL2 { dim: m, weight: 1.0, layout: BlockLayout::Single, center: Some(b) };
    SaddleProblem::new("sqrt-lasso", a, Box::new(L1::new(n, lambda)), None, Box::new(Conjugate::new(g)))
}

/// `‖Aᵀb‖_∞ / (1.1 ‖b‖₂)`.
pub fn sqrt_lasso_default_lambda(a: &SparseMatrix, b: &[f64]) -> Result<f64> {
    let atb = a.spmv_t(b)?;
    let nb = norm2(b);
    if nb == 0.0 {
        return Err(Error::InvalidArgument("right-hand side is zero".into()));
    }
    Ok(norm_inf(&atb) / (1.1 * nb))
}

/// Data of the quadratic Lagrangian
/// `½xᵀQx + cᵀx + yᵀAx − bᵀy − ½yᵀSy`.
#[derive(Clone, Debug)]
pub struct QuadraticData {
    pub q: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl QuadraticData {
    pub fn new(q: DMatrix<f64>, s: DMatrix<f64>, a: SparseMatrix, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        check_len("Q rows", n, q.nrows())?;
        check_len("Q cols", n, q.ncols())?;
        check_len("S rows", m, s.nrows())?;
        check_len("S cols", m, s.ncols())?;
        check_len("b", m, b.len())?;
        check_len("c", n, c.len())?;
        Ok(Self { q, s, a, b, c })
    }

    /// Random instance: `Q = BᵀB/n + μx I`, `S = CᵀC/m + μy I`, Gaussian-like
    /// entries in `A`, `b`, `c`.
    pub fn random(n: usize, m: usize, mu_x: f64, mu_y: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gen = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
        let bq = gen(n, n);
        let bs = gen(m, m);
        let a = gen(m, n);
        let q = bq.transpose() * &bq / n as f64 + DMatrix::identity(n, n) * mu_x;
        let s = bs.transpose() * &bs / m as f64 + DMatrix::identity(m, m) * mu_y;
        let b: Vec<f64> = gen(m, 1).as_slice().to_vec();
        let c: Vec<f64> = gen(n, 1).as_slice().to_vec();
        Self { q, s, a: dense_to_sparse(&a), b, c }
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Solves `[Q Aᵀ; A −S] z = [−c; b]`.
    pub fn saddle(&self) -> Option<PrimalDualPoint> {
        let (n, m) = (self.n(), self.m());
        let a = DMatrix::from_row_slice(m, n, &self.a.to_dense().concat());
        let mut k = DMatrix::zeros(n + m, n + m);
        k.view_mut((0, 0), (n, n)).copy_from(&self.q);
        k.view_mut((0, n), (n, m)).copy_from(&a.transpose());
        k.view_mut((n, 0), (m, n)).copy_from(&a);
        k.view_mut((n, n), (m, m)).copy_from(&(-&self.s));
        let rhs = DVector::from_iterator(n + m, self.c.iter().map(|v| -v).chain(self.b.iter().copied()));
        let z = k.lu().solve(&rhs)?;
        Some(PrimalDualPoint::from_stacked(z.as_slice(), n))
    }

    pub fn to_problem(&self) -> Result<SaddleProblem> {
        let mut p = SaddleProblem::new(
            "quadratic",
            self.a.clone(),
            Box::new(QuadraticProx::new(self.q.clone(), self.c.clone())),
            None,
            Box::new(QuadraticProx::new(self.s.clone(), self.b.clone())),
        )?;
        let min_eig = |m: &DMatrix<f64>| m.clone().symmetric_eigenvalues().min();
        let (mu_f, mu_g) = (min_eig(&self.q), min_eig(&self.s));
        p = p.with_strong_convexity((mu_f > 1e-12).then_some(mu_f), (mu_g > 1e-12).then_some(mu_g))?;
        if let Some(z) = self.saddle() {
            p = p.with_saddle(z)?;
        }
        Ok(p)
    }

    /// Same saddle problem with `½xᵀQx + cᵀx` moved into the smooth term and
    /// `f = 0`, so that the primal prox is separable.
    pub fn to_coordinate_problem(&self) -> Result<SaddleProblem> {
        let base = self.to_problem()?;
        let mut p = SaddleProblem::new(
            "quadratic",
            self.a.clone(),
            Box::new(Zero { dim: self.n() }),
            Some(Box::new(Quadratic::new(dense_to_sparse(&self.q), self.c.clone()))),
            Box::new(QuadraticProx::new(self.s.clone(), self.b.clone())),
        )?
        .with_strong_convexity(base.mu_f, base.mu_gstar)?;
        if let Some(z) = base.saddle {
            p = p.with_saddle(z)?;
        }
        Ok(p)
    }
}

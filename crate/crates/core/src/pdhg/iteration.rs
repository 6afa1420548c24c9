//! Single PDHG iterations and their residuals.

use crate::linalg::vec::{norm1, norm2};
use crate::linalg::PrimalDualPoint;
use crate::problem::{SaddleProblem, Steps};

use super::steps::StepSizes;

/// One Vũ-Condat iteration.
pub fn vu_condat_step(problem: &SaddleProblem, z: &PrimalDualPoint, s: StepSizes) -> PrimalDualPoint {
    let (n, m) = (problem.n(), problem.m());
    let mut v = vec![0.0; m];
    problem.a.spmv_into(&z.x, &mut v);
    for (vj, yj) in v.iter_mut().zip(&z.y) {
        *vj = yj + s.sigma * *vj;
    }
    let mut y_next = vec![0.0; m];
    problem.gstar.prox_into(&v, Steps::Scalar(s.sigma), &mut y_next);

    let w: Vec<f64> = y_next.iter().zip(&z.y).map(|(a, b)| 2.0 * a - b).collect();
    let mut u = vec![0.0; n];
    problem.a.spmv_t_into(&w, &mut u);
    let mut grad = vec![0.0; n];
    problem.smooth_gradient_into(&z.x, &mut grad);
    for i in 0..n {
        u[i] = z.x[i] - s.tau * (grad[i] + u[i]);
    }
    let mut x_next = vec![0.0; n];
    problem.f.prox_into(&u, Steps::Scalar(s.tau), &mut x_next);
    PrimalDualPoint::new(x_next, y_next)
}

/// Result of a Tri-PD iteration: the new iterate and the point `z̄` at which
/// the residuals are evaluated.
#[derive(Clone, Debug)]
pub struct TriPdOutput {
    pub z_next: PrimalDualPoint,
    pub z_bar: PrimalDualPoint,
}

/// One Tri-PD iteration.
pub fn tripd_step(problem: &SaddleProblem, z: &PrimalDualPoint, s: StepSizes) -> TriPdOutput {
    let (n, m) = (problem.n(), problem.m());
    let mut u = vec![0.0; n];
    problem.a.spmv_t_into(&z.y, &mut u);
    let mut grad = vec![0.0; n];
    problem.smooth_gradient_into(&z.x, &mut grad);
    for i in 0..n {
        u[i] = z.x[i] - s.tau * (grad[i] + u[i]);
    }
    let mut x_bar = vec![0.0; n];
    problem.f.prox_into(&u, Steps::Scalar(s.tau), &mut x_bar);

    let mut v = vec![0.0; m];
    problem.a.spmv_into(&x_bar, &mut v);
    for (vj, yj) in v.iter_mut().zip(&z.y) {
        *vj = yj + s.sigma * *vj;
    }
    let mut y_next = vec![0.0; m];
    problem.gstar.prox_into(&v, Steps::Scalar(s.sigma), &mut y_next);

    let dy: Vec<f64> = y_next.iter().zip(&z.y).map(|(a, b)| a - b).collect();
    let mut atdy = vec![0.0; n];
    problem.a.spmv_t_into(&dy, &mut atdy);
    let x_next: Vec<f64> = x_bar.iter().zip(&atdy).map(|(xb, a)| xb - s.tau * a).collect();
    TriPdOutput {
        z_next: PrimalDualPoint::new(x_next, y_next.clone()),
        z_bar: PrimalDualPoint::new(x_bar, y_next),
    }
}

/// Primal and dual residuals `(p, d)` with their 1- and 2-norms.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualPair {
    pub p: Vec<f64>,
    pub d: Vec<f64>,
    pub p_norm1: f64,
    pub d_norm1: f64,
    pub p_norm2: f64,
    pub d_norm2: f64,
}

impl ResidualPair {
    pub fn new(p: Vec<f64>, d: Vec<f64>) -> Self {
        Self { p_norm1: norm1(&p), d_norm1: norm1(&d), p_norm2: norm2(&p), d_norm2: norm2(&d), p, d }
    }

    /// `‖(p, d)‖₂`.
    pub fn norm(&self) -> f64 {
        self.p_norm2.hypot(self.d_norm2)
    }
}

/// Residuals of a Vũ-Condat step, an element of `F(z_next)`.
pub fn residuals_vc(
    problem: &SaddleProblem,
    z_prev: &PrimalDualPoint,
    z_next: &PrimalDualPoint,
    s: StepSizes,
) -> ResidualPair {
    let (n, m) = (problem.n(), problem.m());
    let dx: Vec<f64> = z_prev.x.iter().zip(&z_next.x).map(|(a, b)| a - b).collect();
    let dy: Vec<f64> = z_prev.y.iter().zip(&z_next.y).map(|(a, b)| a - b).collect();
    let mut adx = vec![0.0; m];
    problem.a.spmv_into(&dx, &mut adx);
    let d: Vec<f64> = dy.iter().zip(&adx).map(|(a, b)| a / s.sigma + b).collect();
    let mut p = vec![0.0; n];
    problem.a.spmv_t_into(&dy, &mut p);
    for i in 0..n {
        p[i] += dx[i] / s.tau;
    }
    if problem.f2.is_some() {
        let mut g_next = vec![0.0; n];
        let mut g_prev = vec![0.0; n];
        problem.smooth_gradient_into(&z_next.x, &mut g_next);
        problem.smooth_gradient_into(&z_prev.x, &mut g_prev);
        for i in 0..n {
            p[i] += g_next[i] - g_prev[i];
        }
    }
    ResidualPair::new(p, d)
}

/// Residuals of a Tri-PD step, an element of `F(z̄)`.
pub fn residuals_tripd(
    problem: &SaddleProblem,
    z_prev: &PrimalDualPoint,
    out: &TriPdOutput,
    s: StepSizes,
) -> ResidualPair {
    let n = problem.n();
    let d: Vec<f64> = z_prev.y.iter().zip(&out.z_next.y).map(|(a, b)| (a - b) / s.sigma).collect();
    let mut p: Vec<f64> = z_prev.x.iter().zip(&out.z_next.x).map(|(a, b)| (a - b) / s.tau).collect();
    if problem.f2.is_some() {
        let mut g_bar = vec![0.0; n];
        let mut g_prev = vec![0.0; n];
        problem.smooth_gradient_into(&out.z_bar.x, &mut g_bar);
        problem.smooth_gradient_into(&z_prev.x, &mut g_prev);
        for i in 0..n {
            p[i] += g_bar[i] - g_prev[i];
        }
    }
    ResidualPair::new(p, d)
}

//! Differentiable terms with Lipschitz gradients.

use std::fmt::Debug;

use crate::linalg::vec::dot;
use crate::linalg::SparseMatrix;

pub trait SmoothOracle: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.gradient_into(x, &mut out);
        out
    }

    /// Partial derivative along coordinate `i`.
    fn partial(&self, i: usize, x: &[f64]) -> f64 {
        self.gradient(x)[i]
    }

    /// Global Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;

    /// Coordinatewise Lipschitz constants `L_i`.
    fn coordinate_lipschitz(&self) -> Vec<f64>;

    /// `true` when `∂_i f` depends on `x_i` alone.
    fn is_separable(&self) -> bool {
        false
    }

    /// `Some((w, c))` when the function is `(w/2)‖x − c‖²`.
    fn isotropic_quadratic(&self) -> Option<(f64, Vec<f64>)> {
        None
    }

    /// `Some((Q, c))` when the function is `½ xᵀQx + cᵀx` up to a constant.
    fn quadratic_form(&self) -> Option<(SparseMatrix, Vec<f64>)> {
        None
    }
}

/// `(weight/2) ‖x − center‖²`.
#[derive(Clone, Debug)]
pub struct SeparableQuadratic {
    pub weight: f64,
    pub center: Vec<f64>,
}

impl SeparableQuadratic {
    pub fn new(weight: f64, center: Vec<f64>) -> Self {
        Self { weight, center }
    }
}

impl SmoothOracle for SeparableQuadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let sq: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        0.5 * self.weight * sq
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o = self.weight * (a - c);
        }
    }
    fn partial(&self, i: usize, x: &[f64]) -> f64 {
        self.weight * (x[i] - self.center[i])
    }
    fn lipschitz(&self) -> f64 {
        self.weight
    }
    fn coordinate_lipschitz(&self) -> Vec<f64> {
        vec![self.weight; self.center.len()]
    }
    fn is_separable(&self) -> bool {
        true
    }
    fn isotropic_quadratic(&self) -> Option<(f64, Vec<f64>)> {
        Some((self.weight, self.center.clone()))
    }
    fn quadratic_form(&self) -> Option<(SparseMatrix, Vec<f64>)> {
        let n = self.center.len();
        let q = SparseMatrix::identity(n).scaled(self.weight);
        let c = self.center.iter().map(|v| -self.weight * v).collect();
        Some((q, c))
    }
}

/// `½ xᵀQx + cᵀx` with symmetric positive semidefinite `Q`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    q: SparseMatrix,
    c: Vec<f64>,
    lipschitz: f64,
}

impl Quadratic {
    pub fn new(q: SparseMatrix, c: Vec<f64>) -> Self {
        assert_eq!(q.rows(), q.cols(), "quadratic form must be square");
        assert_eq!(q.rows(), c.len(), "linear term has the wrong length");
        let lipschitz = q.operator_norm_or_bound();
        Self { q, c, lipschitz }
    }
}

impl SmoothOracle for Quadratic {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let mut qx = vec![0.0; x.len()];
        self.q.spmv_into(x, &mut qx);
        0.5 * dot(x, &qx) + dot(&self.c, x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.q.spmv_into(x, out);
        for (o, c) in out.iter_mut().zip(&self.c) {
            *o += c;
        }
    }
    fn partial(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.q.row(i);
        cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum::<f64>() + self.c[i]
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn coordinate_lipschitz(&self) -> Vec<f64> {
        (0..self.q.rows())
            .map(|i| {
                let (cols, vals) = self.q.row(i);
                cols.iter().zip(vals).find(|(&j, _)| j == i).map_or(0.0, |(_, &v)| v)
            })
            .collect()
    }
    fn is_separable(&self) -> bool {
        (0..self.q.rows()).all(|i| self.q.row(i).0.iter().all(|&j| j == i))
    }
    fn quadratic_form(&self) -> Option<(SparseMatrix, Vec<f64>)> {
        Some((self.q.clone(), self.c.clone()))
    }
}

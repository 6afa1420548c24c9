use std::sync::OnceLock;

use crate::error::{check_len, Error, Result};
use crate::linalg::vec::dot;
use crate::linalg::{PrimalDualPoint, SparseMatrix};

use super::prox::ProxOracle;
use super::smooth::SmoothOracle;

/// `min_x max_y f(x) + f₂(x) + ⟨Ax, y⟩ − g*(y)`.
#[derive(Debug)]
pub struct SaddleProblem {
    pub name: String,
    pub a: SparseMatrix,
    pub f: Box<dyn ProxOracle>,
    pub f2: Option<Box<dyn SmoothOracle>>,
    pub gstar: Box<dyn ProxOracle>,
    pub mu_f: Option<f64>,
    pub mu_gstar: Option<f64>,
    pub saddle: Option<PrimalDualPoint>,
    pub optimal_value: Option<f64>,
    norm_a: OnceLock<f64>,
}

impl SaddleProblem {
    pub fn new(
        name: impl Into<String>,
        a: SparseMatrix,
        f: Box<dyn ProxOracle>,
        f2: Option<Box<dyn SmoothOracle>>,
        gstar: Box<dyn ProxOracle>,
    ) -> Result<Self> {
        check_len("primal oracle dimension", a.cols(), f.dim())?;
        check_len("dual oracle dimension", a.rows(), gstar.dim())?;
        if let Some(f2) = &f2 {
            check_len("smooth term dimension", a.cols(), f2.dim())?;
        }
        Ok(Self {
            name: name.into(),
            a,
            f,
            f2,
            gstar,
            mu_f: None,
            mu_gstar: None,
            saddle: None,
            optimal_value: None,
            norm_a: OnceLock::new(),
        })
    }

    pub fn with_strong_convexity(mut self, mu_f: Option<f64>, mu_gstar: Option<f64>) -> Result<Self> {
        for mu in [mu_f, mu_gstar].into_iter().flatten() {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "strong convexity constant must be positive, got {mu}"
                )));
            }
        }
        self.mu_f = mu_f;
        self.mu_gstar = mu_gstar;
        Ok(self)
    }

    pub fn with_saddle(mut self, z: PrimalDualPoint) -> Result<Self> {
        z.check_dims(self.n(), self.m())?;
        self.saddle = Some(z);
        Ok(self)
    }

    pub fn with_optimal_value(mut self, value: f64) -> Self {
        self.optimal_value = Some(value);
        self
    }

    /// Primal dimension.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Dual dimension.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Operator norm of `A`, computed once.
    pub fn norm_a(&self) -> f64 {
        *self.norm_a.get_or_init(|| self.a.operator_norm_or_bound())
    }

    pub fn smooth_lipschitz(&self) -> f64 {
        self.f2.as_ref().map_or(0.0, |f2| f2.lipschitz())
    }

    /// `∇f₂(x)` written into `out`, or zeros without a smooth term.
    pub fn smooth_gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.f2 {
            Some(f2) => f2.gradient_into(x, out),
            None => out.iter_mut().for_each(|o| *o = 0.0),
        }
    }

    /// `f(x) + f₂(x)`.
    pub fn primal_terms(&self, x: &[f64]) -> f64 {
        self.f.value(x) + self.f2.as_ref().map_or(0.0, |f2| f2.value(x))
    }

    pub fn lagrangian(&self, z: &PrimalDualPoint) -> f64 {
        let mut ax = vec![0.0; self.m()];
        self.a.spmv_into(&z.x, &mut ax);
        self.primal_terms(&z.x) + dot(&ax, &z.y) - self.gstar.value(&z.y)
    }

    /// `f(x) + f₂(x) + g(Ax)`, available when `g* ` has a closed-form conjugate.
    pub fn primal_objective(&self, x: &[f64]) -> Option<f64> {
        let mut ax = vec![0.0; self.m()];
        self.a.spmv_into(x, &mut ax);
        Some(self.primal_terms(x) + self.gstar.conjugate_value(&ax)?)
    }
}

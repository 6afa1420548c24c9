use super::vec::{dot, norm2, sub};
use crate::error::{check_len, Result};

/// A primal-dual pair `z = (x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalDualPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PrimalDualPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; m],
        }
    }

    pub fn check_dims(&self, n: usize, m: usize) -> Result<()> {
        check_len("primal dimension", n, self.x.len())?;
        check_len("dual dimension", m, self.y.len())
    }

    pub fn diff(&self, other: &Self) -> Self {
        Self {
            x: sub(&self.x, &other.x),
            y: sub(&self.y, &other.y),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| c * v).collect(),
            y: self.y.iter().map(|v| c * v).collect(),
        }
    }

    /// Euclidean norm of the stacked vector.
    pub fn norm(&self) -> f64 {
        (dot(&self.x, &self.x) + dot(&self.y, &self.y)).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.diff(other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Stacked `(x, y)` as one vector.
    pub fn stacked(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn from_stacked(v: &[f64], n: usize) -> Self {
        Self {
            x: v[..n].to_vec(),
            y: v[n..].to_vec(),
        }
    }

    pub fn primal_norm(&self) -> f64 {
        norm2(&self.x)
    }
}

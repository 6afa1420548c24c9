//! Smoothed duality gap.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::vec::dot;
use crate::linalg::PrimalDualPoint;
use crate::problem::{SaddleProblem, Steps};

/// Smoothing parameters: `beta_x` weights the dual and `beta_y` the primal
/// proximity term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapParams {
    pub beta_x: f64,
    pub beta_y: f64,
}

impl GapParams {
    pub fn new(beta_x: f64, beta_y: f64) -> Result<Self> {
        if beta_x > 0.0 && beta_y > 0.0 && beta_x.is_finite() && beta_y.is_finite() {
            Ok(Self { beta_x, beta_y })
        } else {
            Err(Error::InvalidArgument(format!(
                "smoothing parameters must be positive, got ({beta_x}, {beta_y})"
            )))
        }
    }

    /// `β_x = β_y = ‖A‖` (or 1 when `A = 0`).
    pub fn default_for(problem: &SaddleProblem) -> Self {
        let norm = problem.norm_a();
        let beta = if norm > 0.0 { norm } else { 1.0 };
        Self { beta_x: beta, beta_y: beta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapValue {
    pub value: f64,
    /// The primal inner problem used a linearization of `f₂`.
    pub approximate: bool,
}

/// Primal inner maximizer `argmin_x' f(x') + f₂(x') + ⟨x', v_lin⟩ + (β/2)‖x' − ẋ‖²`
/// with `v_lin = Aᵀy`. Returns the point and whether `f₂` was linearized.
fn primal_inner(problem: &SaddleProblem, aty: &[f64], center: &[f64], beta: f64) -> (Vec<f64>, bool) {
    let n = center.len();
    let v: Vec<f64> = center.iter().zip(aty).map(|(c, a)| c - a / beta).collect();
    let Some(f2) = &problem.f2 else {
        return (problem.f.prox(&v, 1.0 / beta), false);
    };
    if let Some((w, c)) = f2.isotropic_quadratic() {
        let folded: Vec<f64> = v.iter().zip(&c).map(|(vi, ci)| (w * ci + beta * vi) / (w + beta)).collect();
        return (problem.f.prox(&folded, 1.0 / (w + beta)), false);
    }
    if problem.f.is_zero() {
        if let Some((q, lin)) = f2.quadratic_form() {
            let mut m = DMatrix::from_row_slice(n, n, &q.to_dense().concat());
            for i in 0..n {
                m[(i, i)] += beta;
            }
            let rhs = DVector::from_iterator(n, (0..n).map(|i| beta * v[i] - lin[i]));
            if let Some(chol) = m.cholesky() {
                return (chol.solve(&rhs).as_slice().to_vec(), false);
            }
        }
    }
    let grad = f2.gradient(center);
    let shifted: Vec<f64> = v.iter().zip(&grad).map(|(vi, gi)| vi - gi / beta).collect();
    (problem.f.prox(&shifted, 1.0 / beta), true)
}

/// `G_β(z, ż)`; `+∞` when `z` lies outside the domain of `f` or `g*`.
pub fn smoothed_gap(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    center: &PrimalDualPoint,
    beta: GapParams,
) -> Result<GapValue> {
    let (n, m) = (problem.n(), problem.m());
    z.check_dims(n, m)?;
    center.check_dims(n, m)?;
    let fx = problem.primal_terms(&z.x);
    let gy = problem.gstar.value(&z.y);
    if !fx.is_finite() || !gy.is_finite() {
        return Ok(GapValue { value: f64::INFINITY, approximate: false });
    }
    let mut ax = vec![0.0; m];
    problem.a.spmv_into(&z.x, &mut ax);
    let mut aty = vec![0.0; n];
    problem.a.spmv_t_into(&z.y, &mut aty);

    let bx = beta.beta_x;
    let v: Vec<f64> = center.y.iter().zip(&ax).map(|(c, a)| c + a / bx).collect();
    let mut y_star = vec![0.0; m];
    problem.gstar.prox_into(&v, Steps::Scalar(1.0 / bx), &mut y_star);
    let (x_star, approximate) = primal_inner(problem, &aty, &center.x, beta.beta_y);

    let dy: f64 = y_star.iter().zip(&center.y).map(|(a, b)| (a - b) * (a - b)).sum();
    let dx: f64 = x_star.iter().zip(&center.x).map(|(a, b)| (a - b) * (a - b)).sum();
    let upper = fx + dot(&ax, &y_star) - problem.gstar.value(&y_star) - 0.5 * bx * dy;
    let lower = problem.primal_terms(&x_star) + dot(&aty, &x_star) - gy + 0.5 * beta.beta_y * dx;
    Ok(GapValue { value: upper - lower, approximate })
}

/// `G_β(z, z)`.
pub fn self_centered_gap(problem: &SaddleProblem, z: &PrimalDualPoint, beta: GapParams) -> Result<GapValue> {
    smoothed_gap(problem, z, z, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_toy_quadratic, QuadraticData};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(n: usize, m: usize, rng: &mut ChaCha8Rng) -> PrimalDualPoint {
        PrimalDualPoint::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..m).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
    }

    #[test]
    fn zero_at_saddle() {
        let q = QuadraticData::random(6, 4, 0.1, 0.2, 3);
        let p = q.to_problem().unwrap();
        let z = p.saddle.clone().unwrap();
        let g = self_centered_gap(&p, &z, GapParams::default_for(&p)).unwrap();
        assert!(g.value.abs() <= 1e-12, "{}", g.value);
        assert!(!g.approximate);
    }

    #[test]
    fn stronger_smoothing_never_increases_gap() {
        let p = build_toy_quadratic(10, 0.01, 0.1, 0.001).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let z = random_point(10, 10, &mut rng);
            let c = random_point(10, 10, &mut rng);
            let b = GapParams::new(0.7, 1.3).unwrap();
            let b2 = GapParams::new(1.4, 2.6).unwrap();
            let g1 = smoothed_gap(&p, &z, &c, b).unwrap().value;
            let g2 = smoothed_gap(&p, &z, &c, b2).unwrap().value;
            assert!(g2 <= g1 + 1e-12);
            assert!(self_centered_gap(&p, &z, b).unwrap().value > 0.0);
        }
    }

    #[test]
    fn infeasible_point_gives_infinite_gap() {
        use crate::problem::build_sparse_svm;
        use crate::linalg::SparseMatrix;
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.5]]).unwrap();
        let p = build_sparse_svm(a, &[1.0]).unwrap();
        let z = PrimalDualPoint::new(vec![0.0, 0.0], vec![0.5]);
        let g = self_centered_gap(&p, &z, GapParams::default_for(&p)).unwrap();
        assert_eq!(g.value, f64::INFINITY);
    }

    #[test]
    fn rejects_nonpositive_beta() {
        assert!(GapParams::new(0.0, 1.0).is_err());
        assert!(GapParams::new(1.0, f64::NAN).is_err());
    }
}

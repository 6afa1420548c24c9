//! Affine fixed-point form of Vũ-Condat on quadratic problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::PrimalDualPoint;
use crate::pdhg::StepSizes;
use crate::problem::QuadraticData;

/// `z ↦ Rz + d`.
#[derive(Clone, Debug)]
pub struct FixedPointMap {
    pub r: DMatrix<f64>,
    pub d: DVector<f64>,
    n: usize,
}

impl FixedPointMap {
    pub fn apply(&self, z: &PrimalDualPoint) -> PrimalDualPoint {
        let v = DVector::from_vec(z.stacked());
        let out = &self.r * v + &self.d;
        PrimalDualPoint::from_stacked(out.as_slice(), self.n)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        spectral_radius_dense(&self.r)
    }
}

fn spd_inverse(mut m: DMatrix<f64>, step: f64) -> Result<DMatrix<f64>> {
    m *= step;
    for i in 0..m.nrows() {
        m[(i, i)] += 1.0;
    }
    m.cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::InvalidArgument("quadratic form is not positive semidefinite".into()))
}

pub fn build_fixed_point_map(data: &QuadraticData, s: StepSizes) -> Result<FixedPointMap> {
    let (n, m) = (data.n(), data.m());
    let (tau, sigma) = (s.tau, s.sigma);
    let a = DMatrix::from_row_slice(m, n, &data.a.to_dense().concat());
    let at = a.transpose();
    let px = spd_inverse(data.q.clone(), tau)?; // (I + τQ)⁻¹
    let py = spd_inverse(data.s.clone(), sigma)?; // (I + σS)⁻¹
    let b = DVector::from_column_slice(&data.b);
    let c = DVector::from_column_slice(&data.c);

    let mut r = DMatrix::zeros(n + m, n + m);
    let top_left = &px * (DMatrix::identity(n, n) - (&at * &py * &a) * (2.0 * tau * sigma));
    let top_right = (&px * &at * (DMatrix::identity(m, m) - &py * 2.0)) * tau;
    let bottom_left = (&py * &a) * sigma;
    r.view_mut((0, 0), (n, n)).copy_from(&top_left);
    r.view_mut((0, n), (n, m)).copy_from(&top_right);
    r.view_mut((n, 0), (m, n)).copy_from(&bottom_left);
    r.view_mut((n, n), (m, m)).copy_from(&py);

    let dx = &px * (&at * (&py * &b) * (-2.0 * sigma) + c) * (-tau);
    let dy = &py * &b * (-sigma);
    let d = DVector::from_iterator(n + m, dx.iter().chain(dy.iter()).copied());
    Ok(FixedPointMap { r, d, n })
}

/// Largest eigenvalue modulus from a real Schur decomposition.
pub fn spectral_radius_dense(r: &DMatrix<f64>) -> Result<f64> {
    if r.nrows() != r.ncols() {
        return Err(Error::InvalidArgument(format!("matrix is {}x{}, not square", r.nrows(), r.ncols())));
    }
    if r.nrows() == 0 {
        return Ok(0.0);
    }
    let schur = r
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or(Error::NotConverged { what: "Schur decomposition", iterations: 100_000 })?;
    Ok(schur.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max))
}

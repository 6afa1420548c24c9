use super::point::PrimalDualPoint;
use super::sparse::SparseMatrix;
use super::vec::dot;
use crate::error::{check_len, Error, Result};

/// Metric in which a PDHG variant is nonexpansive.
///
/// * `VuCondat`: `(1/τ)‖x‖² + 2⟨Ax, y⟩ + (1/σ)‖y‖²`
/// * `TriPd`: `(1/τ)‖x‖² + (1/σ)‖y‖²`
/// * `Diagonal`: `Σ wxᵢ xᵢ² + Σ wyⱼ yⱼ²`
#[derive(Clone, Debug)]
pub enum VNormWeights<'a> {
    VuCondat {
        tau: f64,
        sigma: f64,
        a: &'a SparseMatrix,
    },
    TriPd {
        tau: f64,
        sigma: f64,
    },
    Diagonal {
        primal: Vec<f64>,
        dual: Vec<f64>,
    },
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<'a> VNormWeights<'a> {
    /// The cross term makes the metric indefinite unless `στ‖A‖² < 1`.
    pub fn vu_condat(tau: f64, sigma: f64, a: &'a SparseMatrix, norm_a: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        check_positive("sigma", sigma)?;
        if sigma * tau * norm_a * norm_a >= 1.0 {
            return Err(Error::InadmissibleSteps(format!(
                "sigma*tau*|A|^2 = {} must be < 1 for the Vu-Condat metric",
                sigma * tau * norm_a * norm_a
            )));
        }
        Ok(Self::VuCondat { tau, sigma, a })
    }

    pub fn tripd(tau: f64, sigma: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        check_positive("sigma", sigma)?;
        Ok(Self::TriPd { tau, sigma })
    }

    pub fn diagonal(primal: Vec<f64>, dual: Vec<f64>) -> Result<Self> {
        for &w in primal.iter().chain(&dual) {
            check_positive("diagonal weight", w)?;
        }
        Ok(Self::Diagonal { primal, dual })
    }

    /// Squared norm; may be slightly negative only through rounding.
    pub fn squared(&self, z: &PrimalDualPoint) -> Result<f64> {
        let xx = dot(&z.x, &z.x);
        let yy = dot(&z.y, &z.y);
        let sq = match self {
            Self::VuCondat { tau, sigma, a } => {
                check_len("v_norm primal", a.cols(), z.x.len())?;
                check_len("v_norm dual", a.rows(), z.y.len())?;
                let ax = a.spmv(&z.x)?;
                xx / tau + 2.0 * dot(&ax, &z.y) + yy / sigma
            }
            Self::TriPd { tau, sigma } => xx / tau + yy / sigma,
            Self::Diagonal { primal, dual } => {
                check_len("v_norm primal", primal.len(), z.x.len())?;
                check_len("v_norm dual", dual.len(), z.y.len())?;
                z.x.iter().zip(primal).map(|(v, w)| w * v * v).sum::<f64>()
                    + z.y.iter().zip(dual).map(|(v, w)| w * v * v).sum::<f64>()
            }
        };
        Ok(sq)
    }
}

/// `‖z‖_V`. A negative square beyond rounding level means the metric is not
/// positive definite for these steps.
pub fn v_norm(z: &PrimalDualPoint, w: &VNormWeights<'_>) -> Result<f64> {
    let sq = w.squared(z)?;
    if sq >= 0.0 {
        return Ok(sq.sqrt());
    }
    let scale = match w {
        VNormWeights::VuCondat { tau, sigma, .. } | VNormWeights::TriPd { tau, sigma } => {
            dot(&z.x, &z.x) / tau + dot(&z.y, &z.y) / sigma
        }
        VNormWeights::Diagonal { .. } => 0.0,
    };
    if -sq <= 1e-14 * scale {
        Ok(0.0)
    } else {
        Err(Error::NegativeSquaredNorm(sq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tripd_euclidean_case() {
        let w = VNormWeights::tripd(1.0, 1.0).unwrap();
        let z = PrimalDualPoint::new(vec![3.0, 0.0], vec![4.0]);
        assert!((v_norm(&z, &w).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn vu_condat_with_zero_matrix_reduces_to_tripd() {
        let a = SparseMatrix::zeros(2, 3);
        let vc = VNormWeights::vu_condat(0.7, 1.3, &a, 0.0).unwrap();
        let tp = VNormWeights::tripd(0.7, 1.3).unwrap();
        let z = PrimalDualPoint::new(vec![0.2, -1.0, 3.0], vec![1.5, -0.25]);
        assert!((v_norm(&z, &vc).unwrap() - v_norm(&z, &tp).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn vu_condat_cross_term() {
        let a = SparseMatrix::from_dense(&[vec![0.5]]).unwrap();
        let w = VNormWeights::vu_condat(1.0, 1.0, &a, 0.5).unwrap();
        let z = PrimalDualPoint::new(vec![1.0], vec![1.0]);
        assert!((v_norm(&z, &w).unwrap() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inadmissible_metric_rejected() {
        let a = SparseMatrix::identity(1);
        assert!(VNormWeights::vu_condat(1.0, 1.0, &a, 1.0).is_err());
        assert!(VNormWeights::tripd(-1.0, 1.0).is_err());
    }

    #[test]
    fn negative_square_is_an_error() {
        // Bypass the constructor to force an indefinite metric.
        let a = SparseMatrix::identity(1).scaled(2.0);
        let w = VNormWeights::VuCondat { tau: 1.0, sigma: 1.0, a: &a };
        let z = PrimalDualPoint::new(vec![1.0], vec![-1.0]);
        assert!(matches!(v_norm(&z, &w), Err(Error::NegativeSquaredNorm(_))));
    }
}

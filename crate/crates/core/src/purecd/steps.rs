use crate::error::{check_len, Error, Result};
use crate::linalg::SparseMatrix;

use super::sampling::SamplingConfig;

/// Per-coordinate steps generated by the single parameter `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureCdStepConfig {
    pub s: f64,
    pub gamma: f64,
    pub sigma: Vec<f64>,
    pub tau: Vec<f64>,
    pub lipschitz: Vec<f64>,
}

/// `σ^j = s / (θ_j max‖A_i‖)` and
/// `τ^i = γ(2 − p̲/p_i) / (L_i + s‖A_i‖² / max‖A_i‖)`, where `A_i` is column `i`.
///
/// A column with no entries and `L_i = 0` gets the step it would have if its
/// norm were the largest one.
pub fn step_sizes_from_s(
    a: &SparseMatrix,
    sampling: &SamplingConfig,
    s: f64,
    gamma: f64,
    lipschitz: &[f64],
) -> Result<PureCdStepConfig> {
    let n = a.cols();
    check_len("coordinate Lipschitz constants", n, lipschitz.len())?;
    check_len("sampling dimension", n, sampling.n())?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("step parameter s must be positive, got {s}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("γ must lie in (0, 1), got {gamma}")));
    }
    let (_, col_norms) = a.row_col_norms();
    let max_col = col_norms.iter().copied().fold(0.0, f64::max);
    if max_col == 0.0 {
        return Err(Error::InvalidArgument("the coupling matrix has no nonzero entry".into()));
    }
    let sigma: Vec<f64> = sampling.theta.iter().map(|&t| s / (t * max_col)).collect();
    let tau: Vec<f64> = (0..n)
        .map(|i| {
            let num = gamma * (2.0 - sampling.p_floor / sampling.p[i]);
            let den = lipschitz[i] + s * col_norms[i] * col_norms[i] / max_col;
            if den > 0.0 {
                num / den
            } else {
                num / (s * max_col)
            }
        })
        .collect();
    let cfg = PureCdStepConfig { s, gamma, sigma, tau, lipschitz: lipschitz.to_vec() };
    cfg.check(a, sampling)?;
    Ok(cfg)
}

impl PureCdStepConfig {
    /// Right-hand side of the step condition for coordinate `i`:
    /// `(2p_i − p̲) / (L_i p_i + p̲⁻¹ p_i Σ_j π_j σ^j A_{j,i}²)`.
    pub fn tau_bound(&self, at: &SparseMatrix, sampling: &SamplingConfig, i: usize) -> f64 {
        let (rows, vals) = at.row(i);
        let weighted: f64 = rows.iter().zip(vals).map(|(&j, &v)| sampling.pi[j] * self.sigma[j] * v * v).sum();
        let pi_ = sampling.p[i];
        let den = self.lipschitz[i] * pi_ + pi_ * weighted / sampling.p_floor;
        if den > 0.0 {
            (2.0 * pi_ - sampling.p_floor) / den
        } else {
            f64::INFINITY
        }
    }

    /// Verifies `τ^i` is strictly below its bound for every coordinate.
    pub fn check(&self, a: &SparseMatrix, sampling: &SamplingConfig) -> Result<()> {
        let at = a.transpose();
        for i in 0..self.tau.len() {
            let bound = self.tau_bound(&at, sampling, i);
            if !(self.tau[i] > 0.0 && self.tau[i] < bound) {
                return Err(Error::InadmissibleSteps(format!(
                    "τ^{i} = {:e} is not below its bound {bound:e}",
                    self.tau[i]
                )));
            }
        }
        Ok(())
    }

    pub fn mean_tau(&self) -> f64 {
        self.tau.iter().sum::<f64>() / self.tau.len() as f64
    }

    pub fn mean_sigma(&self) -> f64 {
        self.sigma.iter().sum::<f64>() / self.sigma.len().max(1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dense: Vec<Vec<f64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| if rng.random_bool(density) { rng.random_range(-2.0..2.0) } else { 0.0 })
                    .collect()
            })
            .collect();
        dense[0][0] = 1.0;
        SparseMatrix::from_dense(&dense).unwrap()
    }

    #[test]
    fn uniform_default_matches_closed_form() {
        let a = random_sparse(7, 5, 0.5, 1);
        let sampling = SamplingConfig::uniform(&a).unwrap();
        let cfg = step_sizes_from_s(&a, &sampling, 1.0, 0.9, &[0.0; 5]).unwrap();
        let (_, cols) = a.row_col_norms();
        let max_col = cols.iter().copied().fold(0.0, f64::max);
        for i in 0..5 {
            if cols[i] > 0.0 {
                let expect = 0.9 * max_col / (cols[i] * cols[i]);
                assert!((cfg.tau[i] - expect).abs() <= 1e-12 * expect);
            }
        }
        for j in 0..7 {
            assert!((cfg.sigma[j] - 1.0 / (sampling.theta[j] * max_col)).abs() < 1e-15);
        }
    }

    #[test]
    fn doubling_s_doubles_sigma_and_shrinks_tau() {
        let a = random_sparse(6, 4, 0.6, 2);
        let sampling = SamplingConfig::uniform(&a).unwrap();
        let l = [0.3, 0.0, 1.0, 0.2];
        let c1 = step_sizes_from_s(&a, &sampling, 0.7, 0.5, &l).unwrap();
        let c2 = step_sizes_from_s(&a, &sampling, 1.4, 0.5, &l).unwrap();
        for (a1, a2) in c1.sigma.iter().zip(&c2.sigma) {
            assert!((a2 - 2.0 * a1).abs() < 1e-15);
        }
        let (_, cols) = a.row_col_norms();
        for i in 0..4 {
            if cols[i] > 0.0 {
                assert!(c2.tau[i] < c1.tau[i]);
            }
        }
    }

    #[test]
    fn admissibility_margin_on_random_instance() {
        let a = random_sparse(8, 6, 0.4, 3);
        let raw = [0.1, 0.2, 0.15, 0.25, 0.2, 0.1];
        let sampling = crate::purecd::derive_sampling(&a, raw.to_vec()).unwrap();
        let l = [0.5, 0.0, 2.0, 0.1, 0.0, 1.0];
        let cfg = step_sizes_from_s(&a, &sampling, 2.5, 0.8, &l).unwrap();
        let dense = a.to_dense();
        let floor = 0.1;
        for i in 0..6 {
            let mut sum = 0.0;
            for j in 0..8 {
                sum += sampling.pi[j] * cfg.sigma[j] * dense[j][i] * dense[j][i];
            }
            let bound = (2.0 * raw[i] - floor) / (l[i] * raw[i] + raw[i] * sum / floor);
            assert!(cfg.tau[i] < bound);
            assert!((cfg.tau[i] / bound - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let a = SparseMatrix::identity(2);
        let sampling = SamplingConfig::uniform(&a).unwrap();
        assert!(step_sizes_from_s(&a, &sampling, 0.0, 0.5, &[0.0; 2]).is_err());
        assert!(step_sizes_from_s(&a, &sampling, 1.0, 1.0, &[0.0; 2]).is_err());
        assert!(step_sizes_from_s(&SparseMatrix::zeros(2, 2), &sampling, 1.0, 0.5, &[0.0; 2]).is_err());
    }
}

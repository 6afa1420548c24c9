use crate::error::{Error, Result};

/// Deterministic PDHG flavour.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Variant {
    #[default]
    VuCondat,
    TriPd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSizes {
    pub tau: f64,
    pub sigma: f64,
}

impl StepSizes {
    pub fn new(tau: f64, sigma: f64) -> Result<Self> {
        if tau > 0.0 && sigma > 0.0 && tau.is_finite() && sigma.is_finite() {
            Ok(Self { tau, sigma })
        } else {
            Err(Error::InvalidArgument(format!("step sizes must be positive, got τ={tau}, σ={sigma}")))
        }
    }

    pub fn product(&self) -> f64 {
        self.tau * self.sigma
    }

    /// `(τ r^u, σ r^{-u})`.
    pub fn rescaled(&self, r: f64, u: i32) -> Self {
        let f = r.powi(u);
        Self { tau: self.tau * f, sigma: self.sigma / f }
    }

    /// `στ‖A‖² + τL_f/2 < 1`.
    pub fn vu_condat_admissible(&self, norm_a: f64, lipschitz: f64) -> bool {
        self.product() * norm_a * norm_a + 0.5 * self.tau * lipschitz < 1.0
    }

    /// `στ‖A‖² < 1` and `τL_f < 2`.
    pub fn tripd_admissible(&self, norm_a: f64, lipschitz: f64) -> bool {
        self.product() * norm_a * norm_a < 1.0 && self.tau * lipschitz < 2.0
    }

    pub fn is_admissible(&self, variant: Variant, norm_a: f64, lipschitz: f64) -> bool {
        match variant {
            Variant::VuCondat => self.vu_condat_admissible(norm_a, lipschitz),
            Variant::TriPd => self.tripd_admissible(norm_a, lipschitz),
        }
    }

    pub fn check(&self, variant: Variant, norm_a: f64, lipschitz: f64) -> Result<()> {
        if self.is_admissible(variant, norm_a, lipschitz) {
            Ok(())
        } else {
            Err(Error::InadmissibleSteps(format!(
                "τ={:e}, σ={:e}, ‖A‖={:e}, L_f={:e} for {:?}",
                self.tau, self.sigma, norm_a, lipschitz, variant
            )))
        }
    }
}

/// Steps maximizing `min(τμ_f, σμ_{g*})` under `στ‖A‖² = γ`.
pub fn oracle_step_sizes(mu_f: f64, mu_gstar: f64, norm_a: f64, gamma: f64) -> Result<StepSizes> {
    if !(mu_f > 0.0 && mu_gstar > 0.0 && norm_a > 0.0) || !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "oracle steps need positive μ_f={mu_f}, μ_g*={mu_gstar}, ‖A‖={norm_a} and γ={gamma} in (0,1)"
        )));
    }
    let na2 = norm_a * norm_a;
    let sigma = (gamma * mu_f / (mu_gstar * na2)).sqrt();
    let tau = (gamma * mu_gstar / (mu_f * na2)).sqrt();
    StepSizes::new(tau, sigma)
}

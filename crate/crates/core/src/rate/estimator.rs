//! Spectral-radius estimation from successive differences of iterates.

/// Norms below this fraction of the iterate scale are rounding noise and are
/// not used to form ratios.
pub const NOISE_FLOOR: f64 = 1e-10;

const PLATEAU_TOL: f64 = 1e-12;

/// Norms of successive differences within one constant-step segment.
#[derive(Clone, Debug, Default)]
pub struct CycleTrace {
    /// Iteration index at which the segment started.
    pub segment_start: usize,
    /// `‖z_s − z_{s−1}‖` in the metric of the previous segment; `None` for
    /// the first segment, where the first recorded norm is used instead.
    pub baseline: Option<f64>,
    pub norms: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Iteration index of the most recent norm.
    pub last_iteration: usize,
    saturated: bool,
}

impl CycleTrace {
    pub fn new(segment_start: usize, baseline: Option<f64>) -> Self {
        Self { segment_start, baseline, ..Self::default() }
    }

    /// Records `‖z_{k+1} − z_k‖_{V_s}` for iteration `k`. `scale` is the size of
    /// the iterate in the same metric. Returns the new ratio, if one was formed.
    pub fn push(&mut self, iteration: usize, norm: f64, scale: f64) -> Option<f64> {
        self.last_iteration = iteration;
        if self.saturated || norm <= NOISE_FLOOR * (1.0 + scale) {
            self.saturated = true;
            return None;
        }
        let ratio = self.norms.last().map(|&prev| norm / prev);
        self.norms.push(norm);
        if let Some(r) = ratio {
            self.ratios.push(r);
        }
        ratio
    }

    pub fn baseline_norm(&self) -> Option<f64> {
        self.baseline.or_else(|| self.norms.first().copied())
    }

    pub fn latest_norm(&self) -> Option<f64> {
        self.norms.last().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    Stabilized,
    CycleMidpoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub value: f64,
    pub kind: RateKind,
    pub at_iteration: usize,
    pub samples_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorParams {
    pub delta: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self { delta: 0.6, eps1: 1e-3, eps2: 1e-5 }
    }
}

/// First interior strict local minimum and maximum of `ratios`.
pub fn detect_extrema(ratios: &[f64]) -> Option<(usize, usize)> {
    if ratios.len() < 3 {
        return None;
    }
    let mut lo = None;
    let mut hi = None;
    for i in 1..ratios.len() - 1 {
        let (a, b, c) = (ratios[i - 1], ratios[i], ratios[i + 1]);
        if lo.is_none() && b < a - PLATEAU_TOL && b < c - PLATEAU_TOL {
            lo = Some(i);
        }
        if hi.is_none() && b > a + PLATEAU_TOL && b > c + PLATEAU_TOL {
            hi = Some(i);
        }
        if lo.is_some() && hi.is_some() {
            break;
        }
    }
    Some((lo?, hi?))
}

/// Least-squares quadratic through `(x_i, y_i)`; returns the abscissa of the
/// vertex when the fit bends the expected way and the vertex stays inside
/// the window.
fn quadratic_vertex(xs: &[f64], ys: &[f64], want_min: bool) -> Option<f64> {
    let x0 = xs[xs.len() / 2];
    let mut m = nalgebra::Matrix3::zeros();
    let mut rhs = nalgebra::Vector3::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let t = x - x0;
        let basis = nalgebra::Vector3::new(1.0, t, t * t);
        m += basis * basis.transpose();
        rhs += basis * y;
    }
    let coef = m.lu().solve(&rhs)?;
    let curvature = coef[2];
    if (want_min && curvature <= 0.0) || (!want_min && curvature >= 0.0) {
        return None;
    }
    let t = -coef[1] / (2.0 * curvature);
    let half = (xs[xs.len() - 1] - xs[0]) / 2.0;
    (t.abs() <= half).then_some(x0 + t)
}

fn window(center: usize, radius: usize, len: usize) -> std::ops::Range<usize> {
    let r = radius.min(center).min(len - 1 - center);
    center - r..center + r + 1
}

fn refined_extremum(phi: &[f64], k: usize, want_min: bool) -> f64 {
    let w = window(k, 2, phi.len());
    let xs: Vec<f64> = w.clone().map(|i| i as f64).collect();
    quadratic_vertex(&xs, &phi[w], want_min).unwrap_or(k as f64)
}

/// Linear least-squares fit through three points around `x`, evaluated at `x`.
fn linear_at(phi: &[f64], x: f64) -> f64 {
    let k = (x.round() as usize).clamp(1, phi.len() - 2);
    let xs = [(k - 1) as f64, k as f64, (k + 1) as f64];
    let ys = &phi[k - 1..k + 2];
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - xm) * (a - xm)).sum();
    ym + sxy / sxx * (x - xm)
}

/// Estimate of `|λ₁|` from the trace of one segment, or `None` when the
/// evidence is not yet sufficient.
pub fn estimate_rate(trace: &CycleTrace, params: EstimatorParams) -> Option<RateEstimate> {
    let r = &trace.ratios;
    if r.len() < 3 {
        return None;
    }
    let latest = trace.latest_norm()?;
    if latest > params.delta * trace.baseline_norm()? {
        return None;
    }
    let n = r.len();
    let (r_next, r_k, r_prev) = (r[n - 1], r[n - 2], r[n - 3]);
    let stable_first = ((1.0 - r_next) / (1.0 - r_k) - 1.0).abs() <= params.eps1;
    let stable_second = (r_next - 2.0 * r_k + r_prev).abs() / (1.0 - r_k).powi(2) <= params.eps2;
    if stable_first && stable_second {
        return Some(RateEstimate {
            value: r_k.min(1.0),
            kind: RateKind::Stabilized,
            at_iteration: trace.last_iteration,
            samples_used: n,
        });
    }
    let (k_lo, k_hi) = detect_extrema(r)?;
    // φ is the squared ratio; its value at the midpoint of the extrema is |λ₁|².
    let phi: Vec<f64> = r.iter().map(|v| v * v).collect();
    let x_lo = refined_extremum(&phi, k_lo, true);
    let x_hi = refined_extremum(&phi, k_hi, false);
    let x_mid = 0.5 * (x_lo + x_hi);
    let value = linear_at(&phi, x_mid).max(0.0).sqrt();
    Some(RateEstimate {
        value: value.min(1.0),
        kind: RateKind::CycleMidpoint,
        at_iteration: trace.last_iteration,
        samples_used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_from_ratios(ratios: &[f64], baseline: f64) -> CycleTrace {
        let mut t = CycleTrace::new(0, Some(baseline));
        let mut norm = 1.0;
        t.push(0, norm, 0.0);
        for (k, r) in ratios.iter().enumerate() {
            norm *= r;
            t.push(k + 1, norm, 0.0);
        }
        t
    }

    fn phi_ratios(rho: f64, theta: f64, a: f64, b: f64, varphi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|k| {
                let x = k as f64;
                let num = a + b * (2.0 * (x + 1.0) * theta + varphi).cos();
                let den = a + b * (2.0 * x * theta + varphi).cos();
                (rho * rho * num / den).sqrt()
            })
            .collect()
    }

    #[test]
    fn constant_ratios_stabilize() {
        let t = trace_from_ratios(&[0.8; 6], 1.0);
        let e = estimate_rate(&t, EstimatorParams::default()).unwrap();
        assert_eq!(e.kind, RateKind::Stabilized);
        assert!((e.value - 0.8).abs() < 1e-14);
    }

    #[test]
    fn gating_blocks_estimate() {
        // Norms stay above δ·baseline.
        let t = trace_from_ratios(&[0.99; 5], 0.1);
        assert!(estimate_rate(&t, EstimatorParams::default()).is_none());
        let short = trace_from_ratios(&[0.5, 0.5], 10.0);
        assert!(estimate_rate(&short, EstimatorParams::default()).is_none());
    }

    #[test]
    fn extrema_examples() {
        assert_eq!(detect_extrema(&[0.1, 0.2, 0.3, 0.4, 0.5]), None);
        assert_eq!(detect_extrema(&[0.8, 0.7, 0.8, 0.9, 0.8]), Some((1, 3)));
        assert_eq!(detect_extrema(&[0.8, 0.8, 0.8, 0.8, 0.8]), None);
    }

    #[test]
    fn cycle_midpoint_recovers_modulus() {
        let ratios = phi_ratios(0.9, 0.1, 1.0, 0.3, 0.0, 60);
        let t = trace_from_ratios(&ratios, 10.0);
        let e = estimate_rate(&t, EstimatorParams::default()).unwrap();
        assert_eq!(e.kind, RateKind::CycleMidpoint);
        assert!((e.value - 0.9).abs() < 1e-3, "{}", e.value);
    }

    #[test]
    fn extrema_bracket_analytic_location() {
        let (theta, varphi, a, b) = (0.1f64, 0.0, 1.0f64, 0.3f64);
        let ratios = phi_ratios(0.9, theta, a, b, varphi, 60);
        let (lo, hi) = detect_extrema(&ratios).unwrap();
        // Extrema of φ solve cos((2x+1)θ + ϕ) = −b cos θ / a.
        let base = (-b * theta.cos() / a).acos();
        let period = std::f64::consts::PI / theta;
        let candidates: Vec<f64> = (0..4)
            .flat_map(|j| {
                let shift = j as f64 * period;
                [(base - theta - varphi) / (2.0 * theta) + shift, (-base - theta - varphi) / (2.0 * theta) + shift]
            })
            .filter(|x| *x > 0.0)
            .collect();
        for k in [lo, hi] {
            assert!(candidates.iter().any(|x| (x - k as f64).abs() <= 1.0), "{k} vs {candidates:?}");
        }
    }

    #[test]
    fn noise_floor_stops_recording() {
        let mut t = CycleTrace::new(0, None);
        t.push(0, 1.0, 1.0);
        assert_eq!(t.push(1, 0.5, 1.0), Some(0.5));
        assert_eq!(t.push(2, 1e-12, 1.0), None);
        assert_eq!(t.push(3, 0.4, 1.0), None);
        assert_eq!(t.ratios.len(), 1);
    }

    #[test]
    fn estimates_never_exceed_one() {
        let t = trace_from_ratios(&[1.2, 1.2, 1.2, 1.2], 1e6);
        assert!(estimate_rate(&t, EstimatorParams::default()).is_none_or(|e| e.value <= 1.0));
        let t = trace_from_ratios(&[0.3, 0.3, 0.3, 0.3], 1e6);
        assert!(estimate_rate(&t, EstimatorParams::default()).unwrap().value <= 1.0);
    }
}

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// One-step rate `M_next / M_prev` of an optimality measure.
pub fn instant_rate(m_prev: f64, m_next: f64) -> Result<f64> {
    for m in [m_prev, m_next] {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NonPositiveMeasure(m));
        }
    }
    Ok(m_next / m_prev)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RateModelKind {
    #[default]
    Iid,
    Ar1,
}

/// Statistical model of the log instantaneous rates at one step size.
#[derive(Clone, Debug, PartialEq)]
pub enum RateModel {
    Iid {
        mean_log: f64,
        std_log: f64,
        count: usize,
    },
    Ar1 {
        a0: f64,
        a1: f64,
        sigma_noise: f64,
        count: usize,
        mean_log: f64,
        /// Estimated variance of `mean_log`.
        variance: f64,
        /// `|a1|` was clamped below one.
        clamped: bool,
    },
}

impl RateModel {
    pub fn mean_log(&self) -> f64 {
        match self {
            RateModel::Iid { mean_log, .. } | RateModel::Ar1 { mean_log, .. } => *mean_log,
        }
    }

    /// Variance attached to the mean: `Σ²/|K|` or `V̂`.
    pub fn mean_variance(&self) -> f64 {
        match self {
            RateModel::Iid { std_log, count, .. } => std_log * std_log / *count as f64,
            RateModel::Ar1 { variance, .. } => *variance,
        }
    }

    pub fn count(&self) -> usize {
        match self {
            RateModel::Iid { count, .. } | RateModel::Ar1 { count, .. } => *count,
        }
    }
}

/// Sample mean and unbiased standard deviation of log rates.
pub fn iid_fit(samples: &[f64]) -> Result<RateModel> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(RateModel::Iid { mean_log: mean, std_log: var.sqrt(), count: n })
}

/// Largest admissible `|a1|`.
pub const AR1_CLAMP: f64 = 1.0 - 1e-6;

/// Least-squares AR(1) fit of one contiguous sequence.
pub fn ar1_fit(samples: &[f64]) -> Result<RateModel> {
    ar1_fit_segments(&[samples.to_vec()])
}

/// AR(1) fit where each segment is contiguous but consecutive segments are
/// not; regression pairs never straddle two segments.
pub fn ar1_fit_segments(segments: &[Vec<f64>]) -> Result<RateModel> {
    let count: usize = segments.iter().map(Vec::len).sum();
    let pairs: Vec<(f64, f64)> = segments.iter().flat_map(|s| s.windows(2).map(|w| (w[0], w[1]))).collect();
    if count < 3 || pairs.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 3, got: count.min(pairs.len() + 1) });
    }
    let k = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx / k <= 1e-15 {
        return Err(Error::InsufficientVariance);
    }
    let mut a1 = sxy / sxx;
    let clamped = a1.abs() > AR1_CLAMP;
    if clamped {
        a1 = a1.signum() * AR1_CLAMP;
    }
    let a0 = my - a1 * mx;
    let sigma_noise = (pairs.iter().map(|p| (p.1 - a0 - a1 * p.0).powi(2)).sum::<f64>() / k).sqrt();
    let one_minus = 1.0 - a1;
    Ok(RateModel::Ar1 {
        a0,
        a1,
        sigma_noise,
        count,
        mean_log: a0 / one_minus,
        variance: sigma_noise * sigma_noise / ((count - 1) as f64 * one_minus * one_minus),
        clamped,
    })
}

/// Denominator of the comparison statistic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StatisticForm {
    /// Sum of the two mean variances.
    #[default]
    SumOfVariances,
    /// Square root of the sum (Welch).
    Welch,
}

/// Probability that the rate of `trusted` exceeds that of `tentative`, i.e.
/// that `tentative` converges faster: `Φ((m̄ − m̲)/den)`. Returns 0.5 when the
/// denominator vanishes.
pub fn compare_rates(trusted: &RateModel, tentative: &RateModel, form: StatisticForm) -> f64 {
    let v = trusted.mean_variance() + tentative.mean_variance();
    let den = match form {
        StatisticForm::SumOfVariances => v,
        StatisticForm::Welch => v.sqrt(),
    };
    if !(den > 0.0) || !den.is_finite() {
        return 0.5;
    }
    let arg = (trusted.mean_log() - tentative.mean_log()) / den;
    if arg == 0.0 {
        return 0.5;
    }
    Normal::standard().cdf(arg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonitorDecision {
    Reject,
    Inconclusive,
    Accept,
}

impl MonitorDecision {
    pub fn from_probability(p: f64) -> Self {
        if p < 0.45 {
            MonitorDecision::Reject
        } else if p > 0.55 {
            MonitorDecision::Accept
        } else {
            MonitorDecision::Inconclusive
        }
    }
}

/// Log-rate samples observed at one value of `s`, split into contiguous visits.
#[derive(Clone, Debug, PartialEq)]
pub struct RatePool {
    pub s: f64,
    pub segments: Vec<Vec<f64>>,
}

impl RatePool {
    pub fn len(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn samples(&self) -> Vec<f64> {
        self.segments.concat()
    }

    pub fn fit(&self, kind: RateModelKind) -> Result<RateModel> {
        match kind {
            RateModelKind::Iid => iid_fit(&self.samples()),
            RateModelKind::Ar1 => ar1_fit_segments(&self.segments),
        }
    }
}

fn same_s(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Trusted, tentative and active step parameters with their sample pools.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorState {
    pub trusted: f64,
    pub tentative: f64,
    pub active: f64,
    pub direction: i32,
    pub ratio: f64,
    pub shrink: f64,
    pub epoch: usize,
    pools: Vec<RatePool>,
}

impl MonitorState {
    /// Starts at `s0` with tentative `s0·r`.
    pub fn new(s0: f64, ratio: f64, shrink: f64) -> Result<Self> {
        Self::with_tentative(s0, s0 * ratio, ratio, shrink)
    }

    /// Explicit tentative value, e.g. from residual balancing. The active
    /// value starts at `trusted`; the direction points from `trusted` to
    /// `tentative`.
    pub fn with_tentative(trusted: f64, tentative: f64, ratio: f64, shrink: f64) -> Result<Self> {
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!("ratio r must exceed 1, got {ratio}")));
        }
        if !(shrink > 0.0 && shrink * ratio < 1.0) {
            return Err(Error::InvalidArgument(format!("need 0 < δ < 1/r, got δ = {shrink}, r = {ratio}")));
        }
        for s in [trusted, tentative] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("step parameter must be positive, got {s}")));
            }
        }
        Ok(Self {
            trusted,
            tentative,
            active: trusted,
            direction: if tentative < trusted { -1 } else { 1 },
            ratio,
            shrink,
            epoch: 0,
            pools: Vec::new(),
        })
    }

    pub fn pool(&self, s: f64) -> Option<&RatePool> {
        self.pools.iter().find(|p| same_s(p.s, s))
    }

    pub fn pools(&self) -> &[RatePool] {
        &self.pools
    }

    /// Adds a log-rate observed at `s`. A new segment starts unless
    /// `continues` is set and the pool already has one.
    pub fn record(&mut self, s: f64, log_rate: f64, continues: bool) {
        let idx = match self.pools.iter().position(|p| same_s(p.s, s)) {
            Some(i) => i,
            None => {
                self.pools.push(RatePool { s, segments: Vec::new() });
                self.pools.len() - 1
            }
        };
        let pool = &mut self.pools[idx];
        match pool.segments.last_mut() {
            Some(seg) if continues => seg.push(log_rate),
            _ => pool.segments.push(vec![log_rate]),
        }
    }

    /// Comparison probability between the trusted and tentative pools, or
    /// `None` when either cannot be fitted yet.
    pub fn probability(&self, kind: RateModelKind, form: StatisticForm) -> Option<f64> {
        let trusted = self.pool(self.trusted)?.fit(kind).ok()?;
        let tentative = self.pool(self.tentative)?.fit(kind).ok()?;
        Some(compare_rates(&trusted, &tentative, form))
    }
}

/// The candidate other than `active` closest to it in ratio; ties go to the
/// tentative value (listed second).
fn next_active(trusted: f64, tentative: f64, active: f64) -> f64 {
    let candidates: Vec<f64> = [trusted, tentative].into_iter().filter(|&c| !same_s(c, active)).collect();
    candidates
        .into_iter()
        .rev()
        .min_by(|a, b| {
            let da = (a / active).ln().abs();
            let db = (b / active).ln().abs();
            da.partial_cmp(&db).expect("finite step parameters")
        })
        .unwrap_or(trusted)
}

/// One monitoring decision.
///
/// * `p < 0.45`: keep the trusted value, reverse the direction, propose
///   `s̄·r^u`, and switch the active value.
/// * `0.45 ≤ p ≤ 0.55`: keep both and switch the active value.
/// * `p > 0.55`: the tentative value becomes trusted and the next proposal is
///   one more factor `r` in the same direction. The active value moves to the
///   new proposal when that is at most one factor `r` away, otherwise to the
///   new trusted value.
pub fn monitor_update(state: MonitorState, p: f64) -> MonitorState {
    let mut next = state;
    next.epoch += 1;
    let r = next.ratio;
    match MonitorDecision::from_probability(p) {
        MonitorDecision::Reject => {
            next.direction = -next.direction;
            next.tentative = next.trusted * r.powi(next.direction);
            next.active = next_active(next.trusted, next.tentative, next.active);
        }
        MonitorDecision::Inconclusive => {
            next.active = next_active(next.trusted, next.tentative, next.active);
        }
        MonitorDecision::Accept => {
            next.trusted = next.tentative;
            next.tentative = next.trusted * r.powi(next.direction);
            let jump = (next.tentative / next.active).ln().abs();
            next.active = if jump <= r.ln() * (1.0 + 1e-12) { next.tentative } else { next.trusted };
        }
    }
    next
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::{PrimalDualPoint, SparseMatrix};
use crate::problem::{SaddleProblem, Steps};

use super::sampling::SamplingConfig;
use super::steps::PureCdStepConfig;

/// Iterations between exact recomputations of the running product `Ax`.
pub const REFRESH_EVERY: usize = 10_000;

/// Output of the reference (dense) step.
#[derive(Clone, Debug, PartialEq)]
pub struct PureCdStep {
    pub z_next: PrimalDualPoint,
    pub coordinate: usize,
    /// Full virtual point `(x̄⁺, ȳ⁺)`.
    pub z_bar: PrimalDualPoint,
}

/// How `∇_i f₂(x̄⁺)` is obtained for the primal residual estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SmoothKind {
    Absent,
    /// Coordinate `i` of the gradient depends on `x_i` only.
    Separable,
    /// Affine gradient: evaluated at `x + p_i⁻¹(x⁺ − x)`.
    Quadratic,
    /// Evaluated at the committed point; biased.
    General,
}

fn smooth_kind(problem: &SaddleProblem) -> SmoothKind {
    match &problem.f2 {
        None => SmoothKind::Absent,
        Some(f2) if f2.is_separable() => SmoothKind::Separable,
        Some(f2) if f2.quadratic_form().is_some() => SmoothKind::Quadratic,
        Some(_) => SmoothKind::General,
    }
}

fn check_supported(problem: &SaddleProblem) -> Result<()> {
    if !problem.f.is_separable() || (0..problem.n()).any(|i| problem.f.block_of(i).len() != 1) {
        return Err(Error::InvalidArgument(
            "coordinate updates need a primal prox that is separable across coordinates".into(),
        ));
    }
    Ok(())
}

/// `∇_i f₂` at the point used by the primal estimate. `x` holds the committed
/// iterate; it is restored before returning.
fn smooth_partial_after(problem: &SaddleProblem, kind: SmoothKind, x: &mut [f64], i: usize, x_old: f64, p_i: f64) -> f64 {
    let Some(f2) = &problem.f2 else { return 0.0 };
    match kind {
        SmoothKind::Quadratic => {
            let committed = x[i];
            x[i] = x_old + (committed - x_old) / p_i;
            let g = f2.partial(i, x);
            x[i] = committed;
            g
        }
        _ => f2.partial(i, x),
    }
}

#[inline]
fn primal_estimate(tau_i: f64, p_i: f64, x_old: f64, x_new: f64, grad_old: f64, grad_new: f64) -> f64 {
    ((x_old - x_new) / tau_i + grad_new - grad_old) / p_i.sqrt()
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn dual_estimate(sigma_j: f64, pi_j: f64, theta_j: f64, y_old: f64, y_new: f64, a_ji: f64, delta: f64, p_i: f64) -> f64 {
    (y_old - y_new) / (sigma_j * pi_j.sqrt()) + pi_j.sqrt() * (theta_j - 1.0) * a_ji * delta / p_i
}

fn column(at: &SparseMatrix, i: usize, m: usize) -> Vec<f64> {
    let mut col = vec![0.0; m];
    let (rows, vals) = at.row(i);
    for (&j, &v) in rows.iter().zip(vals) {
        col[j] = v;
    }
    col
}

/// One iteration computing the full virtual point, then committing the drawn
/// coordinate. Reference implementation for the incremental solver.
pub fn purecd_step<R: Rng + ?Sized>(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    cfg: &PureCdStepConfig,
    sampling: &SamplingConfig,
    rng: &mut R,
) -> Result<PureCdStep> {
    let i = sampling.draw(rng);
    purecd_step_at(problem, z, cfg, sampling, i)
}

/// [`purecd_step`] with the drawn coordinate given.
pub fn purecd_step_at(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    cfg: &PureCdStepConfig,
    sampling: &SamplingConfig,
    i: usize,
) -> Result<PureCdStep> {
    let (n, m) = (problem.n(), problem.m());
    z.check_dims(n, m)?;
    check_len("primal steps", n, cfg.tau.len())?;
    check_len("dual steps", m, cfg.sigma.len())?;
    check_supported(problem)?;
    if i >= n {
        return Err(Error::InvalidArgument(format!("coordinate {i} out of range for n = {n}")));
    }

    let mut v = problem.a.spmv(&z.x)?;
    for j in 0..m {
        v[j] = z.y[j] + cfg.sigma[j] * v[j];
    }
    let mut y_bar = vec![0.0; m];
    problem.gstar.prox_into(&v, Steps::Diagonal(&cfg.sigma), &mut y_bar);

    let mut u = problem.a.spmv_t(&y_bar)?;
    let mut grad = vec![0.0; n];
    problem.smooth_gradient_into(&z.x, &mut grad);
    for k in 0..n {
        u[k] = z.x[k] - cfg.tau[k] * (grad[k] + u[k]);
    }
    let mut x_bar = vec![0.0; n];
    problem.f.prox_into(&u, Steps::Diagonal(&cfg.tau), &mut x_bar);

    let delta = x_bar[i] - z.x[i];
    let mut x_next = z.x.clone();
    x_next[i] = x_bar[i];
    let col = column(&problem.a.transpose(), i, m);
    let mut y_next = z.y.clone();
    for &j in &sampling.neighbors[i] {
        y_next[j] = y_bar[j] + cfg.sigma[j] * sampling.theta[j] * col[j] * delta;
    }
    Ok(PureCdStep {
        z_next: PrimalDualPoint::new(x_next, y_next),
        coordinate: i,
        z_bar: PrimalDualPoint::new(x_bar, y_bar),
    })
}

/// Stochastic residual estimates built from one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticResiduals {
    pub p: Vec<f64>,
    pub d: Vec<f64>,
    /// `∇f₂` is neither separable nor affine; the primal estimate used the
    /// committed point and is biased.
    pub biased: bool,
}

/// Residual estimates from `z → z_next` with drawn coordinate `i`:
/// `d = σ⁻¹π^{−1/2}(y − y⁺) + π^{1/2}(θ − 1)A(p⁻¹(x⁺ − x))` and
/// `p = τ⁻¹p^{−1/2}(x − x⁺) + p_i^{−1/2}(∇_i f₂(x̄⁺) − ∇_i f₂(x))e_i`.
pub fn stochastic_residuals(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    z_next: &PrimalDualPoint,
    i: usize,
    cfg: &PureCdStepConfig,
    sampling: &SamplingConfig,
) -> Result<StochasticResiduals> {
    let (n, m) = (problem.n(), problem.m());
    z.check_dims(n, m)?;
    z_next.check_dims(n, m)?;
    let kind = smooth_kind(problem);
    let grad_old = problem.f2.as_ref().map_or(0.0, |f2| f2.partial(i, &z.x));
    let mut x = z_next.x.clone();
    let grad_new = smooth_partial_after(problem, kind, &mut x, i, z.x[i], sampling.p[i]);
    let mut p = vec![0.0; n];
    p[i] = primal_estimate(cfg.tau[i], sampling.p[i], z.x[i], z_next.x[i], grad_old, grad_new);

    let delta = z_next.x[i] - z.x[i];
    let col = column(&problem.a.transpose(), i, m);
    let mut d = vec![0.0; m];
    for &j in &sampling.neighbors[i] {
        d[j] = dual_estimate(
            cfg.sigma[j],
            sampling.pi[j],
            sampling.theta[j],
            z.y[j],
            z_next.y[j],
            col[j],
            delta,
            sampling.p[i],
        );
    }
    Ok(StochasticResiduals { p, d, biased: kind == SmoothKind::General })
}

/// Squared norms of the residual estimates of one incremental step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateUpdate {
    pub coordinate: usize,
    pub primal_sq: f64,
    pub dual_sq: f64,
}

/// Lazy running mean of a vector whose entries change one at a time.
#[derive(Clone, Debug)]
struct LazyMean {
    sum: Vec<f64>,
    since: Vec<usize>,
}

impl LazyMean {
    fn new(len: usize) -> Self {
        Self { sum: vec![0.0; len], since: vec![1; len] }
    }

    fn reset(&mut self) {
        self.sum.iter_mut().for_each(|s| *s = 0.0);
        self.since.iter_mut().for_each(|s| *s = 1);
    }

    /// Entry `k` changes from `old` at iterate `count`.
    #[inline]
    fn before_change(&mut self, k: usize, old: f64, count: usize) {
        self.sum[k] += old * (count - self.since[k]) as f64;
        self.since[k] = count;
    }

    fn mean(&self, current: &[f64], count: usize) -> Vec<f64> {
        let c = count.max(1);
        current
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.sum[k] + v * (c + 1 - self.since[k]) as f64) / c as f64)
            .collect()
    }
}

/// Incremental solver: per step, only the dual entries `J(i)` of `ȳ⁺` and
/// coordinate `i` of `x̄⁺` are computed, and `Ax` is maintained by updates.
#[derive(Clone, Debug)]
pub struct PureCd<'a> {
    problem: &'a SaddleProblem,
    sampling: SamplingConfig,
    at: SparseMatrix,
    x: Vec<f64>,
    y: Vec<f64>,
    ax: Vec<f64>,
    rng: ChaCha8Rng,
    iterations: usize,
    smooth: SmoothKind,
    mean_x: LazyMean,
    mean_y: LazyMean,
    mean_count: usize,
    max_drift: f64,
    buf_v: Vec<f64>,
    buf_bar: Vec<f64>,
}

impl<'a> PureCd<'a> {
    pub fn new(problem: &'a SaddleProblem, z0: PrimalDualPoint, sampling: SamplingConfig, seed: u64) -> Result<Self> {
        let (n, m) = (problem.n(), problem.m());
        z0.check_dims(n, m)?;
        check_len("sampling dimension", n, sampling.n())?;
        check_len("sampling dual dimension", m, sampling.m())?;
        check_supported(problem)?;
        let ax = problem.a.spmv(&z0.x)?;
        let widest = sampling.neighbors.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            problem,
            at: problem.a.transpose(),
            x: z0.x,
            y: z0.y,
            ax,
            rng: ChaCha8Rng::seed_from_u64(seed),
            iterations: 0,
            smooth: smooth_kind(problem),
            mean_x: LazyMean::new(n),
            mean_y: LazyMean::new(m),
            mean_count: 0,
            max_drift: 0.0,
            buf_v: vec![0.0; widest],
            buf_bar: vec![0.0; widest],
            sampling,
        })
    }

    pub fn sampling(&self) -> &SamplingConfig {
        &self.sampling
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn point(&self) -> PrimalDualPoint {
        PrimalDualPoint::new(self.x.clone(), self.y.clone())
    }

    /// Position of the generator in its stream; together with the seed this
    /// identifies the random state.
    pub fn rng_word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// `true` when the primal residual estimate is biased for this problem.
    pub fn estimates_biased(&self) -> bool {
        self.smooth == SmoothKind::General
    }

    /// Largest `‖Ax − A·x‖_∞` seen at a refresh.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    /// Recomputes `Ax` exactly and returns the drift it removed.
    pub fn refresh_products(&mut self) -> f64 {
        let exact = self.problem.a.spmv(&self.x).expect("dimensions checked at construction");
        let drift = exact.iter().zip(&self.ax).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        self.ax = exact;
        self.max_drift = self.max_drift.max(drift);
        drift
    }

    /// Restarts the running means `x^av`, `y^av`.
    pub fn reset_average(&mut self) {
        self.mean_x.reset();
        self.mean_y.reset();
        self.mean_count = 0;
    }

    /// Number of iterates in the running means.
    pub fn average_count(&self) -> usize {
        self.mean_count
    }

    /// Running means of the committed iterates since the last reset (the
    /// current point when no step has been taken).
    pub fn average(&self) -> PrimalDualPoint {
        if self.mean_count == 0 {
            return self.point();
        }
        PrimalDualPoint::new(
            self.mean_x.mean(&self.x, self.mean_count),
            self.mean_y.mean(&self.y, self.mean_count),
        )
    }

    pub fn step(&mut self, cfg: &PureCdStepConfig) -> CoordinateUpdate {
        let i = self.sampling.draw(&mut self.rng);
        self.step_at(cfg, i)
    }

    pub fn step_at(&mut self, cfg: &PureCdStepConfig, i: usize) -> CoordinateUpdate {
        let problem = self.problem;
        let js = &self.sampling.neighbors[i];
        let nj = js.len();

        let mut t = 0;
        while t < nj {
            let block = problem.gstar.block_of(js[t]);
            let len = block.len();
            for (k, j) in block.clone().enumerate() {
                self.buf_v[t + k] = self.y[j] + cfg.sigma[j] * self.ax[j];
            }
            problem.gstar.prox_block(
                block.start,
                &self.buf_v[t..t + len],
                Steps::Diagonal(&cfg.sigma[block]),
                &mut self.buf_bar[t..t + len],
            );
            t += len;
        }

        let (rows, vals) = self.at.row(i);
        let mut aty = 0.0;
        let mut t = 0;
        for (&j, &a) in rows.iter().zip(vals) {
            while js[t] != j {
                t += 1;
            }
            aty += a * self.buf_bar[t];
        }

        let grad_old = problem.f2.as_ref().map_or(0.0, |f2| f2.partial(i, &self.x));
        let tau = cfg.tau[i];
        let mut x_bar = [0.0];
        problem.f.prox_block(i, &[self.x[i] - tau * (grad_old + aty)], Steps::Scalar(tau), &mut x_bar);
        let x_old = self.x[i];
        let delta = x_bar[0] - x_old;

        self.iterations += 1;
        self.mean_count += 1;
        let count = self.mean_count;
        if delta != 0.0 {
            self.mean_x.before_change(i, x_old, count);
        }
        self.x[i] = x_bar[0];
        let p_i = self.sampling.p[i];

        let mut dual_sq = 0.0;
        let mut r = 0;
        for (t, &j) in js.iter().enumerate() {
            let a = if r < rows.len() && rows[r] == j {
                r += 1;
                vals[r - 1]
            } else {
                0.0
            };
            let theta = self.sampling.theta[j];
            let y_new = self.buf_bar[t] + cfg.sigma[j] * theta * a * delta;
            let d = dual_estimate(cfg.sigma[j], self.sampling.pi[j], theta, self.y[j], y_new, a, delta, p_i);
            dual_sq += d * d;
            if y_new != self.y[j] {
                self.mean_y.before_change(j, self.y[j], count);
            }
            self.y[j] = y_new;
            self.ax[j] += a * delta;
        }

        let grad_new = smooth_partial_after(problem, self.smooth, &mut self.x, i, x_old, p_i);
        let pe = primal_estimate(tau, p_i, x_old, self.x[i], grad_old, grad_new);

        if self.iterations % REFRESH_EVERY == 0 {
            self.refresh_products();
        }
        CoordinateUpdate { coordinate: i, primal_sq: pe * pe, dual_sq }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdhg::{tripd_step, StepSizes};
    use crate::problem::prox::SquaredL2;
    use crate::problem::smooth::SeparableQuadratic;
    use crate::problem::{build_toy_quadratic, QuadraticData};
    use crate::purecd::step_sizes_from_s;

    fn random_point(n: usize, m: usize, seed: u64) -> PrimalDualPoint {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PrimalDualPoint::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..m).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
    }

    fn setup(problem: &SaddleProblem, s: f64) -> (SamplingConfig, PureCdStepConfig) {
        let sampling = SamplingConfig::for_problem(problem, None).unwrap();
        let l = problem.f2.as_ref().map_or(vec![0.0; problem.n()], |f2| f2.coordinate_lipschitz());
        let cfg = step_sizes_from_s(&problem.a, &sampling, s, 0.9, &l).unwrap();
        (sampling, cfg)
    }

    #[test]
    fn saddle_point_is_fixed_for_every_draw() {
        let problem = build_toy_quadratic(6, 0.1, 0.2, 0.01).unwrap();
        let (sampling, cfg) = setup(&problem, 1.0);
        let z = PrimalDualPoint::zeros(6, 6);
        for i in 0..6 {
            let step = purecd_step_at(&problem, &z, &cfg, &sampling, i).unwrap();
            assert_eq!(step.z_next, z);
            let est = stochastic_residuals(&problem, &z, &step.z_next, i, &cfg, &sampling).unwrap();
            assert!(est.p.iter().chain(&est.d).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn only_drawn_coordinates_move() {
        let data = QuadraticData::random(5, 7, 0.1, 0.1, 4);
        let problem = data.to_coordinate_problem().unwrap();
        let (sampling, cfg) = setup(&problem, 0.8);
        let z = random_point(5, 7, 5);
        for i in 0..5 {
            let step = purecd_step_at(&problem, &z, &cfg, &sampling, i).unwrap();
            for k in 0..5 {
                if k != i {
                    assert_eq!(step.z_next.x[k], z.x[k]);
                }
            }
            for j in 0..7 {
                if !sampling.neighbors[i].contains(&j) {
                    assert_eq!(step.z_next.y[j], z.y[j]);
                }
            }
        }
    }

    #[test]
    fn expected_primal_move_is_p_times_virtual_move() {
        let data = QuadraticData::random(4, 3, 0.2, 0.3, 6);
        let problem = data.to_coordinate_problem().unwrap();
        let raw = [0.1, 0.4, 0.2, 0.3];
        let sampling = crate::purecd::derive_sampling(&problem.a, raw.to_vec()).unwrap();
        let cfg = step_sizes_from_s(&problem.a, &sampling, 1.0, 0.9, &[0.0; 4]).unwrap();
        let z = random_point(4, 3, 7);
        let mut mean = vec![0.0; 4];
        let mut bar = None;
        for (i, &p) in raw.iter().enumerate() {
            let step = purecd_step_at(&problem, &z, &cfg, &sampling, i).unwrap();
            for k in 0..4 {
                mean[k] += p * (step.z_next.x[k] - z.x[k]);
            }
            bar = Some(step.z_bar);
        }
        let bar = bar.unwrap();
        for k in 0..4 {
            assert!((mean[k] - raw[k] * (bar.x[k] - z.x[k])).abs() < 1e-14);
        }
    }

    #[test]
    fn single_column_matches_swapped_tripd() {
        // With n = 1 every draw hits the only column and θ = 1. The dual-first
        // iteration is Tri-PD on the problem with the roles of x and y swapped.
        let col = vec![vec![0.7], vec![-1.2], vec![0.4]];
        let a = SparseMatrix::from_dense(&col).unwrap();
        let problem = SaddleProblem::new(
            "column",
            a.clone(),
            Box::new(SquaredL2::centered(0.8, vec![0.3])),
            None,
            Box::new(SquaredL2::centered(1.5, vec![0.1, -0.2, 0.5])),
        )
        .unwrap();
        let swapped = SaddleProblem::new(
            "swapped",
            a.transpose().scaled(-1.0),
            Box::new(SquaredL2::centered(1.5, vec![0.1, -0.2, 0.5])),
            None,
            Box::new(SquaredL2::centered(0.8, vec![0.3])),
        )
        .unwrap();
        let (sampling, cfg) = setup(&problem, 1.3);
        assert_eq!(sampling.theta, vec![1.0; 3]);
        let steps = StepSizes::new(cfg.sigma[0], cfg.tau[0]).unwrap();
        let mut z = PrimalDualPoint::new(vec![0.9], vec![-0.4, 0.2, 1.0]);
        let mut w = PrimalDualPoint::new(z.y.clone(), z.x.clone());
        for _ in 0..20 {
            z = purecd_step_at(&problem, &z, &cfg, &sampling, 0).unwrap().z_next;
            w = tripd_step(&swapped, &w, steps).z_next;
            for (a, b) in z.y.iter().zip(&w.x) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((z.x[0] - w.y[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn single_coordinate_estimates_are_exact() {
        let a = SparseMatrix::from_dense(&[vec![1.0], vec![2.0]]).unwrap();
        let problem = SaddleProblem::new(
            "one",
            a,
            Box::new(SquaredL2::new(1, 0.5)),
            Some(Box::new(SeparableQuadratic::new(0.3, vec![1.0]))),
            Box::new(SquaredL2::new(2, 1.0)),
        )
        .unwrap();
        let (sampling, cfg) = setup(&problem, 1.0);
        let z = PrimalDualPoint::new(vec![0.4], vec![0.3, -0.6]);
        let step = purecd_step_at(&problem, &z, &cfg, &sampling, 0).unwrap();
        let est = stochastic_residuals(&problem, &z, &step.z_next, 0, &cfg, &sampling).unwrap();
        // Deterministic residuals at the virtual point.
        let xb = &step.z_bar.x;
        let yb = &step.z_bar.y;
        let p_bar = (z.x[0] - xb[0]) / cfg.tau[0] + 0.3 * (xb[0] - 1.0) - 0.3 * (z.x[0] - 1.0);
        assert!((est.p[0] - p_bar).abs() < 1e-12);
        let ax = [z.x[0], 2.0 * z.x[0]];
        let axb = [xb[0], 2.0 * xb[0]];
        for j in 0..2 {
            let d_bar = (z.y[j] - yb[j]) / cfg.sigma[j] + ax[j] - axb[j];
            assert!((est.d[j] - d_bar).abs() < 1e-12);
        }
    }

    #[test]
    fn incremental_solver_matches_reference_steps() {
        let data = QuadraticData::random(6, 4, 0.1, 0.2, 8);
        let problem = data.to_coordinate_problem().unwrap();
        let (sampling, cfg) = setup(&problem, 0.6);
        let z0 = random_point(6, 4, 9);
        let mut solver = PureCd::new(&problem, z0.clone(), sampling.clone(), 42).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut z = z0;
        for _ in 0..300 {
            let step = purecd_step(&problem, &z, &cfg, &sampling, &mut rng).unwrap();
            let est = stochastic_residuals(&problem, &z, &step.z_next, step.coordinate, &cfg, &sampling).unwrap();
            let up = solver.step(&cfg);
            assert_eq!(up.coordinate, step.coordinate);
            z = step.z_next;
            assert!(solver.point().distance(&z) < 1e-10);
            let psq: f64 = est.p.iter().map(|v| v * v).sum();
            let dsq: f64 = est.d.iter().map(|v| v * v).sum();
            assert!((up.primal_sq - psq).abs() <= 1e-9 * (1.0 + psq));
            assert!((up.dual_sq - dsq).abs() <= 1e-9 * (1.0 + dsq));
        }
        assert!(solver.refresh_products() < 1e-10);
    }

    #[test]
    fn running_mean_matches_explicit_average() {
        let problem = build_toy_quadratic(5, 0.1, 0.1, 0.01).unwrap();
        let (sampling, cfg) = setup(&problem, 1.0);
        let mut solver = PureCd::new(&problem, random_point(5, 5, 1), sampling, 3).unwrap();
        for _ in 0..7 {
            solver.step(&cfg);
        }
        solver.reset_average();
        let mut sum = PrimalDualPoint::zeros(5, 5);
        for k in 1..=40 {
            solver.step(&cfg);
            let z = solver.point();
            for (s, v) in sum.x.iter_mut().zip(&z.x) {
                *s += v;
            }
            for (s, v) in sum.y.iter_mut().zip(&z.y) {
                *s += v;
            }
            let avg = solver.average();
            assert!(avg.distance(&sum.scaled(1.0 / k as f64)) < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_trajectory() {
        let problem = build_toy_quadratic(8, 0.05, 0.1, 0.01).unwrap();
        let (sampling, cfg) = setup(&problem, 2.0);
        let run = |seed| {
            let mut s = PureCd::new(&problem, random_point(8, 8, 2), sampling.clone(), seed).unwrap();
            for _ in 0..500 {
                s.step(&cfg);
            }
            s.point()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn rejects_nonseparable_primal() {
        let data = QuadraticData::random(3, 2, 0.1, 0.1, 1);
        let mut problem = data.to_problem().unwrap();
        let q = nalgebra::DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 2.0, 0.0, 0.0, 0.0, 1.0]);
        problem.f = Box::new(crate::problem::prox::QuadraticProx::new(q, vec![0.0; 3]));
        let sampling = SamplingConfig::uniform(&problem.a).unwrap();
        assert!(PureCd::new(&problem, PrimalDualPoint::zeros(3, 2), sampling, 0).is_err());
    }
}

//! Proximal operator library.
//!
//! Every oracle works on contiguous coordinate blocks. Separable functions use
//! blocks of length one; group norms and their conjugates use longer blocks.
//! Block oracles evaluate their prox with the Euclidean block geometry, which
//! is exact whenever the step is uniform on the coordinates of a block that
//! can move.

use std::fmt::Debug;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::linalg::vec::{dot, norm1, norm2};

/// Step of a proximal evaluation: one scalar or one value per coordinate.
#[derive(Clone, Copy, Debug)]
pub enum Steps<'a> {
    Scalar(f64),
    Diagonal(&'a [f64]),
}

impl<'a> Steps<'a> {
    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Steps::Scalar(t) => *t,
            Steps::Diagonal(s) => s[k],
        }
    }

    #[inline]
    pub fn slice(&self, range: Range<usize>) -> Steps<'a> {
        match *self {
            Steps::Scalar(t) => Steps::Scalar(t),
            Steps::Diagonal(s) => Steps::Diagonal(&s[range]),
        }
    }
}

/// A convex function accessed through its proximal operator and value.
pub trait ProxOracle: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Extended-real value; `f64::INFINITY` outside the domain.
    fn value(&self, x: &[f64]) -> f64;

    /// Value of the Fenchel conjugate, when known in closed form.
    fn conjugate_value(&self, _y: &[f64]) -> Option<f64> {
        None
    }

    /// Coordinate block containing `j`.
    fn block_of(&self, j: usize) -> Range<usize> {
        j..j + 1
    }

    /// Prox restricted to the block starting at `start`. `v`, `steps` and
    /// `out` are indexed relative to the block.
    fn prox_block(&self, start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]);

    fn is_separable(&self) -> bool {
        true
    }

    /// `true` for the zero function, whose prox is the identity.
    fn is_zero(&self) -> bool {
        false
    }

    fn prox_into(&self, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim());
        debug_assert_eq!(out.len(), v.len());
        let mut j = 0;
        while j < v.len() {
            let b = self.block_of(j);
            self.prox_block(b.start, &v[b.clone()], steps.slice(b.clone()), &mut out[b.clone()]);
            j = b.end;
        }
    }

    /// `prox_{t f}(v)` with a scalar step.
    fn prox(&self, v: &[f64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.prox_into(v, Steps::Scalar(t), &mut out);
        out
    }

    /// Prox in the metric `diag(steps)⁻¹`.
    fn prox_diag(&self, v: &[f64], steps: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.prox_into(v, Steps::Diagonal(steps), &mut out);
        out
    }
}

#[inline]
fn soft_threshold(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

fn center_at(center: &Option<Vec<f64>>, k: usize) -> f64 {
    center.as_ref().map_or(0.0, |c| c[k])
}

fn centered_dot(center: &Option<Vec<f64>>, y: &[f64]) -> f64 {
    center.as_ref().map_or(0.0, |c| dot(c, y))
}

/// Componentwise soft-thresholding, the prox of `t‖·‖₁`.
pub fn prox_l1(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|&vi| soft_threshold(vi, t)).collect()
}

/// Prox of `(weight/2)‖· − center‖²` with step `t`.
pub fn prox_sq_l2(v: &[f64], t: f64, weight: f64, center: &[f64]) -> Vec<f64> {
    v.iter()
        .zip(center)
        .map(|(&vi, &ci)| (vi + t * weight * ci) / (1.0 + t * weight))
        .collect()
}

/// Block soft-thresholding, the prox of `t Σ_b ‖v_b‖₂`.
pub fn prox_l2_block(v: &[f64], t: f64, blocks: &[Range<usize>]) -> Vec<f64> {
    let mut out = v.to_vec();
    for b in blocks {
        block_shrink(&mut out[b.clone()], t);
    }
    out
}

fn block_shrink(block: &mut [f64], t: f64) {
    let n = norm2(block);
    let factor = if n > t { 1.0 - t / n } else { 0.0 };
    block.iter_mut().for_each(|v| *v *= factor);
}

fn block_project(block: &mut [f64], radius: f64) {
    let n = norm2(block);
    if n > radius {
        let factor = radius / n;
        block.iter_mut().for_each(|v| *v *= factor);
    }
}

/// Prox of the conjugate by the Moreau identity:
/// `prox_{t g*}(v) = v − t prox_{g/t}(v/t)`.
pub fn prox_conjugate(v: &[f64], t: f64, primal: &dyn ProxOracle) -> Vec<f64> {
    let scaled: Vec<f64> = v.iter().map(|x| x / t).collect();
    let inner = primal.prox(&scaled, 1.0 / t);
    v.iter().zip(inner).map(|(vi, pi)| vi - t * pi).collect()
}

/// Prox of the conjugate of `u ↦ max(0, 1 − u)` summed over coordinates.
pub fn prox_hinge_conjugate(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|&vi| (vi - t).clamp(-1.0, 0.0)).collect()
}

/// Prox of the indicator of `{0}`.
pub fn prox_zero_indicator(v: &[f64], _t: f64) -> Vec<f64> {
    vec![0.0; v.len()]
}

/// Contiguous, equally sized blocks, or one block spanning everything.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockLayout {
    Uniform(usize),
    Single,
}

impl BlockLayout {
    fn block_of(&self, j: usize, dim: usize) -> Range<usize> {
        match *self {
            BlockLayout::Uniform(len) => {
                let start = (j / len) * len;
                start..(start + len).min(dim)
            }
            BlockLayout::Single => 0..dim,
        }
    }

    pub fn blocks(&self, dim: usize) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut j = 0;
        while j < dim {
            let b = self.block_of(j, dim);
            j = b.end;
            out.push(b);
        }
        out
    }
}

/// The zero function.
#[derive(Clone, Debug)]
pub struct Zero {
    pub dim: usize,
}

impl ProxOracle for Zero {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<f64> {
        Some(if y.iter().all(|&v| v == 0.0) { 0.0 } else { f64::INFINITY })
    }
    fn prox_block(&self, _start: usize, v: &[f64], _steps: Steps<'_>, out: &mut [f64]) {
        out.copy_from_slice(v);
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// Indicator of the origin.
#[derive(Clone, Debug)]
pub struct ZeroIndicator {
    pub dim: usize,
}

impl ProxOracle for ZeroIndicator {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        if x.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn conjugate_value(&self, _y: &[f64]) -> Option<f64> {
        Some(0.0)
    }
    fn prox_block(&self, _start: usize, _v: &[f64], _steps: Steps<'_>, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
}

/// `weight · ‖x − center‖₁`.
#[derive(Clone, Debug)]
pub struct L1 {
    pub dim: usize,
    pub weight: f64,
    pub center: Option<Vec<f64>>,
}

impl L1 {
    pub fn new(dim: usize, weight: f64) -> Self {
        Self { dim, weight, center: None }
    }

    pub fn centered(weight: f64, center: Vec<f64>) -> Self {
        Self { dim: center.len(), weight, center: Some(center) }
    }
}

impl ProxOracle for L1 {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        match &self.center {
            Some(c) => self.weight * x.iter().zip(c).map(|(a, b)| (a - b).abs()).sum::<f64>(),
            None => self.weight * norm1(x),
        }
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<f64> {
        let feasible = y.iter().all(|v| v.abs() <= self.weight * (1.0 + 1e-12));
        Some(if feasible { centered_dot(&self.center, y) } else { f64::INFINITY })
    }
    fn prox_block(&self, start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        for k in 0..v.len() {
            let c = center_at(&self.center, start + k);
            out[k] = c + soft_threshold(v[k] - c, steps.at(k) * self.weight);
        }
    }
}

/// `(weight/2) ‖x − center‖²`.
#[derive(Clone, Debug)]
pub struct SquaredL2 {
    pub dim: usize,
    pub weight: f64,
    pub center: Option<Vec<f64>>,
}

impl SquaredL2 {
    pub fn new(dim: usize, weight: f64) -> Self {
        Self { dim, weight, center: None }
    }

    pub fn centered(weight: f64, center: Vec<f64>) -> Self {
        Self { dim: center.len(), weight, center: Some(center) }
    }
}

impl ProxOracle for SquaredL2 {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        let sq: f64 = (0..x.len())
            .map(|k| {
                let d = x[k] - center_at(&self.center, k);
                d * d
            })
            .sum();
        0.5 * self.weight * sq
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<f64> {
        Some(0.5 * dot(y, y) / self.weight + centered_dot(&self.center, y))
    }
    fn prox_block(&self, start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        for k in 0..v.len() {
            let tw = steps.at(k) * self.weight;
            out[k] = (v[k] + tw * center_at(&self.center, start + k)) / (1.0 + tw);
        }
    }
}

/// `Σ max(0, 1 − u_j)`.
#[derive(Clone, Debug)]
pub struct Hinge {
    pub dim: usize,
}

impl ProxOracle for Hinge {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, u: &[f64]) -> f64 {
        u.iter().map(|&v| (1.0 - v).max(0.0)).sum()
    }
    fn conjugate_value(&self, s: &[f64]) -> Option<f64> {
        Some(HingeConjugate { dim: self.dim }.value(s))
    }
    fn prox_block(&self, _start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        for k in 0..v.len() {
            let t = steps.at(k);
            out[k] = if v[k] < 1.0 - t {
                v[k] + t
            } else if v[k] <= 1.0 {
                1.0
            } else {
                v[k]
            };
        }
    }
}

/// Conjugate of the hinge loss: `s ↦ Σ s_j` on `[−1, 0]^m`.
#[derive(Clone, Debug)]
pub struct HingeConjugate {
    pub dim: usize,
}

impl ProxOracle for HingeConjugate {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, s: &[f64]) -> f64 {
        let tol = 1e-12;
        if s.iter().all(|&v| (-1.0 - tol..=tol).contains(&v)) {
            s.iter().sum()
        } else {
            f64::INFINITY
        }
    }
    fn conjugate_value(&self, u: &[f64]) -> Option<f64> {
        Some(Hinge { dim: self.dim }.value(u))
    }
    fn prox_block(&self, _start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        for k in 0..v.len() {
            out[k] = (v[k] - steps.at(k)).clamp(-1.0, 0.0);
        }
    }
}

/// `weight · Σ_b ‖x_b − center_b‖₂` over contiguous blocks.
#[derive(Clone, Debug)]
pub struct GroupL2 {
    pub dim: usize,
    pub weight: f64,
    pub layout: BlockLayout,
    pub center: Option<Vec<f64>>,
}

impl GroupL2 {
    fn block_norms(&self, x: &[f64]) -> Vec<f64> {
        self.layout
            .blocks(self.dim)
            .into_iter()
            .map(|b| {
                b.map(|k| {
                    let d = x[k] - center_at(&self.center, k);
                    d * d
                })
                .sum::<f64>()
                .sqrt()
            })
            .collect()
    }
}

impl ProxOracle for GroupL2 {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.weight * self.block_norms(x).iter().sum::<f64>()
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<f64> {
        let ball = BallIndicator {
            dim: self.dim,
            radius: self.weight,
            layout: self.layout.clone(),
            center: self.center.clone(),
        };
        Some(ball.value(y))
    }
    fn block_of(&self, j: usize) -> Range<usize> {
        self.layout.block_of(j, self.dim)
    }
    fn is_separable(&self) -> bool {
        self.layout == BlockLayout::Uniform(1)
    }
    fn prox_block(&self, start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        let t = steps.at(0);
        for k in 0..v.len() {
            out[k] = v[k] - center_at(&self.center, start + k);
        }
        block_shrink(out, t * self.weight);
        for k in 0..v.len() {
            out[k] += center_at(&self.center, start + k);
        }
    }
}

/// `⟨center, y⟩ + ι{‖y_b‖₂ ≤ radius for every block b}`, the conjugate of
/// [`GroupL2`].
#[derive(Clone, Debug)]
pub struct BallIndicator {
    pub dim: usize,
    pub radius: f64,
    pub layout: BlockLayout,
    pub center: Option<Vec<f64>>,
}

impl ProxOracle for BallIndicator {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, y: &[f64]) -> f64 {
        let limit = self.radius * (1.0 + 1e-12);
        let feasible = self.layout.blocks(self.dim).into_iter().all(|b| norm2(&y[b]) <= limit);
        if feasible {
            centered_dot(&self.center, y)
        } else {
            f64::INFINITY
        }
    }
    fn conjugate_value(&self, x: &[f64]) -> Option<f64> {
        let g = GroupL2 {
            dim: self.dim,
            weight: self.radius,
            layout: self.layout.clone(),
            center: self.center.clone(),
        };
        Some(g.value(x))
    }
    fn block_of(&self, j: usize) -> Range<usize> {
        self.layout.block_of(j, self.dim)
    }
    fn is_separable(&self) -> bool {
        self.layout == BlockLayout::Uniform(1)
    }
    fn prox_block(&self, start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        for k in 0..v.len() {
            out[k] = v[k] - steps.at(k) * center_at(&self.center, start + k);
        }
        block_project(out, self.radius);
    }
}

/// The conjugate `g*` of a primal oracle, with prox from the Moreau identity.
#[derive(Debug)]
pub struct Conjugate<P: ProxOracle> {
    pub primal: P,
}

impl<P: ProxOracle> Conjugate<P> {
    pub fn new(primal: P) -> Self {
        Self { primal }
    }
}

impl<P: ProxOracle> ProxOracle for Conjugate<P> {
    fn dim(&self) -> usize {
        self.primal.dim()
    }
    fn value(&self, y: &[f64]) -> f64 {
        self.primal
            .conjugate_value(y)
            .expect("conjugate wrapper requires a primal oracle with a closed-form conjugate")
    }
    fn conjugate_value(&self, x: &[f64]) -> Option<f64> {
        Some(self.primal.value(x))
    }
    fn block_of(&self, j: usize) -> Range<usize> {
        self.primal.block_of(j)
    }
    fn is_separable(&self) -> bool {
        self.primal.is_separable()
    }
    fn prox_block(&self, start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        let len = v.len();
        let scaled: Vec<f64> = (0..len).map(|k| v[k] / steps.at(k)).collect();
        let inv: Vec<f64> = (0..len).map(|k| 1.0 / steps.at(k)).collect();
        self.primal.prox_block(start, &scaled, Steps::Diagonal(&inv), out);
        for k in 0..len {
            out[k] = v[k] - steps.at(k) * out[k];
        }
    }
}

/// `½ xᵀQx + cᵀx` with a dense symmetric positive semidefinite `Q`.
#[derive(Clone, Debug)]
pub struct QuadraticProx {
    pub q: DMatrix<f64>,
    pub c: Vec<f64>,
}

impl QuadraticProx {
    pub fn new(q: DMatrix<f64>, c: Vec<f64>) -> Self {
        assert_eq!(q.nrows(), q.ncols(), "quadratic form must be square");
        assert_eq!(q.nrows(), c.len(), "linear term has the wrong length");
        Self { q, c }
    }
}

impl ProxOracle for QuadraticProx {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        0.5 * xv.dot(&(&self.q * &xv)) + dot(&self.c, x)
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<f64> {
        let chol = self.q.clone().cholesky()?;
        let r = DVector::from_iterator(y.len(), y.iter().zip(&self.c).map(|(a, b)| a - b));
        Some(0.5 * r.dot(&chol.solve(&r)))
    }
    fn block_of(&self, _j: usize) -> Range<usize> {
        0..self.dim()
    }
    fn is_separable(&self) -> bool {
        false
    }
    fn prox_block(&self, _start: usize, v: &[f64], steps: Steps<'_>, out: &mut [f64]) {
        // (T⁻¹ + Q) x = T⁻¹ v − c
        let n = v.len();
        let mut m = self.q.clone();
        let mut rhs = DVector::zeros(n);
        for k in 0..n {
            let inv_t = 1.0 / steps.at(k);
            m[(k, k)] += inv_t;
            rhs[k] = inv_t * v[k] - self.c[k];
        }
        let sol = m
            .cholesky()
            .expect("T^-1 + Q is positive definite for a PSD quadratic")
            .solve(&rhs);
        out.copy_from_slice(sol.as_slice());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Minimizes `a·φ(x) + ½(x − v)²` over `[lo, hi]` by a grid followed by
    /// golden-section refinement. Comparisons use the exact difference
    /// `F(x) − F(b)` so that the refinement is not limited by cancellation.
    fn scalar_argmin(phi: impl Fn(f64) -> f64, a: f64, v: f64, lo: f64, hi: f64) -> f64 {
        let diff = |x: f64, b: f64| a * (phi(x) - phi(b)) + 0.5 * (x - b) * (x + b - 2.0 * v);
        let n = 2000;
        let h = (hi - lo) / n as f64;
        let mut best = lo;
        for k in 1..=n {
            let x = lo + k as f64 * h;
            if diff(x, best) < 0.0 {
                best = x;
            }
        }
        let (mut l, mut r) = ((best - h).max(lo), (best + h).min(hi));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = r - g * (r - l);
            let d = l + g * (r - l);
            if diff(c, d) < 0.0 {
                r = d;
            } else {
                l = c;
            }
        }
        0.5 * (l + r)
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(prox_l1(&[2.0], 1.0), vec![1.0]);
        assert_eq!(prox_l1(&[0.5], 1.0), vec![0.0]);
        assert_eq!(prox_l1(&[-3.0], 1.0), vec![-2.0]);
    }

    #[test]
    fn prox_l1_matches_scalar_minimization() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v: f64 = rng.random_range(-3.0..3.0);
            let t: f64 = rng.random_range(0.05..2.0);
            let brute = scalar_argmin(f64::abs, t, v, -5.0, 5.0);
            assert!((prox_l1(&[v], t)[0] - brute).abs() < 1e-8);
        }
    }

    #[test]
    fn prox_sq_l2_examples() {
        assert_eq!(prox_sq_l2(&[2.0], 1.0, 1.0, &[0.0]), vec![1.0]);
        let v = [1.5, -2.0];
        let out = prox_sq_l2(&v, 1e-12, 3.0, &[1.0, 1.0]);
        assert!((out[0] - v[0]).abs() < 1e-9 && (out[1] - v[1]).abs() < 1e-9);
    }

    #[test]
    fn prox_sq_l2_satisfies_optimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (v, t, w, c): (f64, f64, f64, f64) = (
                rng.random_range(-3.0..3.0),
                rng.random_range(0.1..2.0),
                rng.random_range(0.1..3.0),
                rng.random_range(-1.0..1.0),
            );
            let x = prox_sq_l2(&[v], t, w, &[c])[0];
            // derivative of t*(w/2)(x-c)^2 + (x-v)^2/2
            assert!((t * w * (x - c) + (x - v)).abs() < 1e-10);
        }
    }

    #[test]
    fn block_soft_threshold() {
        let v = [1.0, 2.0, 2.0];
        let out = prox_l2_block(&v, 1.0, &[0..3]);
        for k in 0..3 {
            assert!((out[k] - v[k] * 2.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(prox_l2_block(&[0.3, 0.4], 0.5, &[0..2]), vec![0.0, 0.0]);
        assert_eq!(prox_l2_block(&[0.0, 0.0], 0.5, &[0..2]), vec![0.0, 0.0]);
    }

    #[test]
    fn block_soft_threshold_matches_radial_oracle() {
        // The prox only rescales each block, so the block norm solves a 1-D problem.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let blocks = vec![0..2, 2..5, 5..6];
        for _ in 0..20 {
            let v: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
            let t = rng.random_range(0.1..2.0);
            let out = prox_l2_block(&v, t, &blocks);
            for b in &blocks {
                let nv = norm2(&v[b.clone()]);
                let r = scalar_argmin(|r| r, t, nv, 0.0, 5.0);
                let got = norm2(&out[b.clone()]);
                assert!((got - r).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn hinge_conjugate_examples() {
        assert_eq!(prox_hinge_conjugate(&[0.5], 0.5), vec![0.0]);
        assert_eq!(prox_hinge_conjugate(&[-5.0], 0.3), vec![-1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let v: f64 = rng.random_range(-3.0..2.0);
            let t: f64 = rng.random_range(0.05..2.0);
            let brute = scalar_argmin(|s| s, t, v, -1.0, 0.0);
            assert!((prox_hinge_conjugate(&[v], t)[0] - brute).abs() < 1e-8);
        }
        // The direct formula agrees with the Moreau route through the hinge.
        let v = [-2.0, -0.4, 0.1, 1.7];
        let direct = prox_hinge_conjugate(&v, 0.6);
        let moreau = prox_conjugate(&v, 0.6, &Hinge { dim: 4 });
        for (a, b) in direct.iter().zip(moreau) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_indicator_and_duality() {
        assert_eq!(prox_zero_indicator(&[1.0, -2.0, 3.0], 0.5), vec![0.0; 3]);
        // The conjugate of ι{0} is 0 whose prox is the identity.
        let v = [1.0, -2.0];
        let out = prox_conjugate(&v, 0.7, &ZeroIndicator { dim: 2 });
        assert_eq!(out, v.to_vec());
        let zero = Zero { dim: 2 };
        assert_eq!(prox_conjugate(&v, 1.0, &zero), vec![0.0, 0.0]);
    }

    #[test]
    fn conjugate_of_squared_l2_is_squared_l2() {
        // (1/2)‖·‖² is self-conjugate.
        let v = [0.3, -1.2, 2.0];
        let t = 0.8;
        let via_moreau = prox_conjugate(&v, t, &SquaredL2::new(3, 1.0));
        let direct = SquaredL2::new(3, 1.0).prox(&v, t);
        for (a, b) in via_moreau.iter().zip(direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_of_l1_is_box_projection() {
        let v = [-3.0, -0.5, 0.2, 1.4];
        let out = prox_conjugate(&v, 0.9, &L1::new(4, 1.0));
        let expected: Vec<f64> = v.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
        for (a, b) in out.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn moreau_involution() {
        // The conjugate of the conjugate wrapper gives back the primal prox.
        let v = [0.4, -1.7, 2.2, -0.1];
        let t = 0.6;
        let l1 = Conjugate::new(Conjugate::new(L1::new(4, 0.8)));
        let sq = Conjugate::new(Conjugate::new(SquaredL2::centered(2.0, vec![1.0, 0.0, -1.0, 0.5])));
        let direct_l1 = L1::new(4, 0.8).prox(&v, t);
        let direct_sq = SquaredL2::centered(2.0, vec![1.0, 0.0, -1.0, 0.5]).prox(&v, t);
        for k in 0..4 {
            assert!((l1.prox(&v, t)[k] - direct_l1[k]).abs() < 1e-10);
            assert!((sq.prox(&v, t)[k] - direct_sq[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn ball_indicator_is_group_conjugate() {
        let g = GroupL2 {
            dim: 4,
            weight: 1.5,
            layout: BlockLayout::Uniform(2),
            center: Some(vec![0.1, -0.2, 0.3, 0.0]),
        };
        let ball = BallIndicator {
            dim: 4,
            radius: 1.5,
            layout: BlockLayout::Uniform(2),
            center: Some(vec![0.1, -0.2, 0.3, 0.0]),
        };
        let v = [2.0, -1.0, 0.3, 0.2];
        let via_moreau = Conjugate::new(g).prox(&v, 0.7);
        let direct = ball.prox(&v, 0.7);
        for (a, b) in via_moreau.iter().zip(direct) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn small_step_approaches_projection() {
        let v = [-3.0, 0.5, 2.0];
        let out = HingeConjugate { dim: 3 }.prox(&v, 1e-12);
        assert_eq!(out, vec![-1.0, 0.0, 0.0]);
        let ball = BallIndicator { dim: 2, radius: 1.0, layout: BlockLayout::Single, center: None };
        let p = ball.prox(&[3.0, 4.0], 1e-12);
        assert!((p[0] - 0.6).abs() < 1e-12 && (p[1] - 0.8).abs() < 1e-12);
        let l1 = L1::new(2, 1.0).prox(&[0.7, -0.2], 1e-12);
        assert!((l1[0] - 0.7).abs() < 1e-9 && (l1[1] + 0.2).abs() < 1e-9);
    }

    #[test]
    fn quadratic_prox_matches_diagonal_case() {
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let quad = QuadraticProx::new(q, vec![0.0, 0.0]);
        let out = quad.prox(&[1.0, 1.0], 0.5);
        assert!((out[0] - 0.5).abs() < 1e-14);
        assert!((out[1] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn diagonal_steps_apply_per_coordinate() {
        let out = L1::new(2, 1.0).prox_diag(&[2.0, 2.0], &[0.5, 1.5]);
        assert_eq!(out, vec![1.5, 0.5]);
    }
}

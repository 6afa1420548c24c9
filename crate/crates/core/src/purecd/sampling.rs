use std::ops::Range;

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::SparseMatrix;
use crate::problem::SaddleProblem;

/// Coordinate sampling law and the quantities derived from the sparsity of `A`.
///
/// Primal coordinate `i` is column `i` of `A`; `neighbors[i]` is `J(i)`, the
/// dual coordinates touched when `i` is drawn, and `owners[j]` is `I(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingConfig {
    pub p: Vec<f64>,
    pub pi: Vec<f64>,
    pub p_floor: f64,
    pub theta: Vec<f64>,
    pub neighbors: Vec<Vec<usize>>,
    pub owners: Vec<Vec<usize>>,
    cumulative: Option<Vec<f64>>,
}

/// Sampling for `A` with explicit probabilities `p`.
pub fn derive_sampling(a: &SparseMatrix, p: Vec<f64>) -> Result<SamplingConfig> {
    derive_sampling_blocked(a, p, |j| j..j + 1)
}

/// Like [`derive_sampling`], but every dual block returned by `block_of` is
/// touched as a whole: if column `i` reaches any coordinate of a block, the
/// whole block belongs to `J(i)`.
pub fn derive_sampling_blocked(
    a: &SparseMatrix,
    p: Vec<f64>,
    block_of: impl Fn(usize) -> Range<usize>,
) -> Result<SamplingConfig> {
    let (m, n) = (a.rows(), a.cols());
    check_len("sampling probabilities", n, p.len())?;
    if n == 0 {
        return Err(Error::InvalidArgument("no primal coordinates to sample".into()));
    }
    if let Some(i) = p.iter().position(|&pi| !(pi > 0.0 && pi.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "coordinate {i} has probability {}; every coordinate needs a positive probability",
            p[i]
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
    }

    let at = a.transpose();
    let mut neighbors = Vec::with_capacity(n);
    for i in 0..n {
        let (rows, vals) = at.row(i);
        let mut js = Vec::with_capacity(rows.len());
        for (&j, &v) in rows.iter().zip(vals) {
            if v != 0.0 {
                js.extend(block_of(j));
            }
        }
        js.sort_unstable();
        js.dedup();
        neighbors.push(js);
    }
    let mut owners = vec![Vec::new(); m];
    for (i, js) in neighbors.iter().enumerate() {
        for &j in js {
            owners[j].push(i);
        }
    }

    let p_floor = p.iter().copied().fold(f64::INFINITY, f64::min);
    let pi: Vec<f64> = owners.iter().map(|is| is.iter().map(|&i| p[i]).sum()).collect();
    // A dual coordinate no column reaches is never updated; θ = 1 keeps the
    // step formulas finite.
    let theta = pi.iter().map(|&q| if q > 0.0 { q / p_floor } else { 1.0 }).collect();

    let uniform = p.iter().all(|&q| q == p[0]);
    let cumulative = (!uniform).then(|| {
        let mut acc = 0.0;
        p.iter()
            .map(|&q| {
                acc += q;
                acc
            })
            .collect()
    });
    Ok(SamplingConfig { p, pi, p_floor, theta, neighbors, owners, cumulative })
}

impl SamplingConfig {
    /// Uniform sampling over the columns of `A`.
    pub fn uniform(a: &SparseMatrix) -> Result<Self> {
        let n = a.cols();
        derive_sampling(a, vec![1.0 / n as f64; n])
    }

    /// Sampling for `problem`, expanded to the blocks of `g*`. Uniform when
    /// `p` is `None`.
    pub fn for_problem(problem: &SaddleProblem, p: Option<Vec<f64>>) -> Result<Self> {
        let n = problem.n();
        let p = p.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        derive_sampling_blocked(&problem.a, p, |j| problem.gstar.block_of(j))
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn m(&self) -> usize {
        self.pi.len()
    }

    pub fn is_uniform(&self) -> bool {
        self.cumulative.is_none()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.cumulative {
            None => rng.random_range(0..self.n()),
            Some(c) => {
                let u: f64 = rng.random::<f64>() * c[c.len() - 1];
                c.partition_point(|&v| v <= u).min(c.len() - 1)
            }
        }
    }
}

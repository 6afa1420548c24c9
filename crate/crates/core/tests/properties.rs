use pdadapt::gap::{self_centered_gap, GapParams};
use pdadapt::linalg::vec::{dot, norm2};
use pdadapt::linalg::{v_norm, PrimalDualPoint, SparseMatrix, VNormWeights};
use pdadapt::pdhg::{goldstein_update_norms, GoldsteinState, StepSizes};
use pdadapt::problem::prox::{prox_hinge_conjugate, prox_l1, prox_l2_block, prox_sq_l2};
use pdadapt::problem::QuadraticData;
use pdadapt::purecd::{derive_sampling, step_sizes_from_s};
use proptest::prelude::*;

fn sparse_matrix(max_dim: usize) -> impl Strategy<Value = SparseMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop_oneof![2 => Just(0.0), 1 => -3.0..3.0f64], m * n).prop_map(move |vals| {
            let rows: Vec<Vec<f64>> = vals.chunks(n).map(<[f64]>::to_vec).collect();
            SparseMatrix::from_dense(&rows).unwrap()
        })
    })
}

/// Matrices in which every column has a nonzero entry.
fn covered_matrix(max_dim: usize) -> impl Strategy<Value = SparseMatrix> {
    sparse_matrix(max_dim).prop_map(|a| {
        let mut dense = a.to_dense();
        let m = dense.len();
        for i in 0..a.cols() {
            if dense.iter().all(|r| r[i] == 0.0) {
                dense[i % m][i] = 1.0;
            }
        }
        SparseMatrix::from_dense(&dense).unwrap()
    })
}

fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, len)
}

proptest! {
    #[test]
    fn transpose_is_the_adjoint((a, x, y) in sparse_matrix(12).prop_flat_map(|a| {
        let (m, n) = (a.rows(), a.cols());
        (Just(a), vector(n), vector(m))
    })) {
        let lhs = dot(&a.spmv(&x).unwrap(), &y);
        let rhs = dot(&x, &a.spmv_t(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        prop_assert_eq!(a.transpose().transpose().to_dense(), a.to_dense());
    }

    #[test]
    fn v_norm_is_absolutely_homogeneous(
        (a, x, y) in sparse_matrix(8).prop_flat_map(|a| {
            let (m, n) = (a.rows(), a.cols());
            (Just(a), vector(n), vector(m))
        }),
        c in -5.0..5.0f64,
        gamma in 0.05..0.95f64,
        ratio in 0.1..10.0f64,
    ) {
        let na = a.operator_norm_or_bound().max(1e-3);
        let (tau, sigma) = ((gamma * ratio).sqrt() / na, (gamma / ratio).sqrt() / na);
        let z = PrimalDualPoint::new(x, y);
        for w in [VNormWeights::vu_condat(tau, sigma, &a, na).unwrap(), VNormWeights::tripd(tau, sigma).unwrap()] {
            let base = v_norm(&z, &w).unwrap();
            let scaled = v_norm(&z.scaled(c), &w).unwrap();
            prop_assert!((scaled - c.abs() * base).abs() <= 1e-9 * (1.0 + base));
        }
    }

    #[test]
    fn proximal_maps_are_nonexpansive(u in vector(6), v in vector(6), t in 1e-3..10.0f64, w in 0.0..5.0f64) {
        let dist = |a: &[f64], b: &[f64]| norm2(&a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
        let d = dist(&u, &v);
        let center = vec![0.5; 6];
        let blocks = [0..2, 2..6];
        let maps: [Box<dyn Fn(&[f64]) -> Vec<f64>>; 4] = [
            Box::new(|x| prox_l1(x, t)),
            Box::new(|x| prox_sq_l2(x, t, w, &center)),
            Box::new(|x| prox_l2_block(x, t, &blocks)),
            Box::new(|x| prox_hinge_conjugate(x, t)),
        ];
        for f in &maps {
            prop_assert!(dist(&f(&u), &f(&v)) <= d * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn goldstein_preserves_the_step_product(
        seq in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 1..200),
        tau in 1e-3..1e3f64,
        sigma in 1e-3..1e3f64,
    ) {
        let (mut s, mut g) = (StepSizes::new(tau, sigma).unwrap(), GoldsteinState::default());
        for (p, d) in seq {
            (s, g, _) = goldstein_update_norms(p, d, s, g);
            prop_assert!((s.product() / (tau * sigma) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_probabilities_are_consistent(
        (a, raw) in covered_matrix(8).prop_flat_map(|a| {
            let n = a.cols();
            (Just(a), prop::collection::vec(0.05..1.0f64, n))
        })
    ) {
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let cfg = derive_sampling(&a, p.clone()).unwrap();
        let dense = a.to_dense();
        for (j, row) in dense.iter().enumerate() {
            let pi: f64 = (0..a.cols()).filter(|&i| row[i] != 0.0).map(|i| p[i]).sum();
            prop_assert!((cfg.pi[j] - pi).abs() < 1e-12);
            if pi > 0.0 {
                prop_assert!((cfg.theta[j] * cfg.p_floor - pi).abs() < 1e-12);
            }
        }
        for i in 0..a.cols() {
            let js: Vec<usize> = (0..a.rows()).filter(|&j| dense[j][i] != 0.0).collect();
            prop_assert_eq!(&cfg.neighbors[i], &js);
        }
    }

    #[test]
    fn purecd_steps_from_any_s_are_admissible(a in covered_matrix(10), s in 1e-4..1e4f64, gamma in 0.01..0.99f64) {
        let n = a.cols();
        let sampling = derive_sampling(&a, vec![1.0 / n as f64; n]).unwrap();
        let cfg = step_sizes_from_s(&a, &sampling, s, gamma, &vec![0.0; n]).unwrap();
        prop_assert!(cfg.check(&a, &sampling).is_ok());
        prop_assert!(cfg.tau.iter().chain(&cfg.sigma).all(|v| *v > 0.0 && v.is_finite()));
    }

    #[test]
    fn smoothed_gap_is_nonnegative(seed in 0u64..1000, x in vector(5), y in vector(4), bx in 0.1..5.0f64, by in 0.1..5.0f64) {
        let data = QuadraticData::random(5, 4, 0.05, 0.1, seed);
        let p = data.to_problem().unwrap();
        let g = self_centered_gap(&p, &PrimalDualPoint::new(x, y), GapParams::new(bx, by).unwrap()).unwrap();
        prop_assert!(g.value >= -1e-9 * (1.0 + g.value.abs()));
    }
}

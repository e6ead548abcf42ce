use concurrence::linalg::{dagger, hermitian_eigs, kron, singular_values, trace_norm, CMatrix, C64};
use concurrence::states::{gaussian_matrix, random_unitary, rng_from_seed};
use proptest::prelude::*;

fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let g = gaussian_matrix(n, n, &mut rng_from_seed(seed));
    (&g + &g.dagger()).scale_real(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dagger_is_an_involution(n in 1usize..6, m in 1usize..6, seed in any::<u64>()) {
        let a = gaussian_matrix(n, m, &mut rng_from_seed(seed));
        prop_assert_eq!(dagger(&dagger(&a)), a);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(n in 2usize..9, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(n, n, &mut rng);
        let u = random_unitary(n, &mut rng).unwrap();
        let v = random_unitary(n, &mut rng).unwrap();
        let uav = &(&u * &a) * &v;
        prop_assert!((trace_norm(&uav).unwrap() - trace_norm(&a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn trace_norm_dominates_trace(n in 1usize..9, seed in any::<u64>()) {
        let a = gaussian_matrix(n, n, &mut rng_from_seed(seed));
        prop_assert!(trace_norm(&a).unwrap() >= a.trace().norm() - 1e-12);
    }

    #[test]
    fn singular_values_of_hermitian_are_abs_eigenvalues(n in 1usize..17, seed in any::<u64>()) {
        let a = random_hermitian(n, seed);
        let sv = singular_values(&a).unwrap();
        let mut abs_eig: Vec<f64> = hermitian_eigs(&a, false).unwrap().eigenvalues.iter().map(|x| x.abs()).collect();
        abs_eig.sort_by(|x, y| y.total_cmp(x));
        for (s, e) in sv.iter().zip(&abs_eig) {
            prop_assert!((s - e).abs() < 1e-10, "{} vs {}", s, e);
        }
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(2, 3, &mut rng);
        let b = gaussian_matrix(3, 2, &mut rng);
        let c = gaussian_matrix(3, 2, &mut rng);
        let d = gaussian_matrix(2, 3, &mut rng);
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn eigendecomposition_reconstructs_up_to_dimension_36() {
    for n in [1usize, 2, 3, 5, 8, 13, 16, 25, 36] {
        for seed in 0..4 {
            let a = random_hermitian(n, 100 * n as u64 + seed);
            let spec = hermitian_eigs(&a, true).unwrap();
            let q = spec.eigenvectors.as_ref().unwrap();
            assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let lambda = CMatrix::from_diag(&spec.eigenvalues);
            let rebuilt = &(q * &lambda) * &q.dagger();
            assert!(rebuilt.max_abs_diff(&a) <= 1e-10, "n={n} reconstruction {}", rebuilt.max_abs_diff(&a));
            let qq = &q.dagger() * q;
            assert!(qq.max_abs_diff(&CMatrix::identity(n)) <= 1e-10, "n={n} unitarity");
            let sum: f64 = spec.eigenvalues.iter().sum();
            assert!((sum - a.trace().re).abs() <= 1e-9 * n as f64);
        }
    }
}

#[test]
fn eigensolver_handles_degenerate_spectra() {
    // (N-1)/N I - J/N has a single -1/N and an (N-1)-fold degenerate (N-1)/N
    let n = 7;
    let nf = n as f64;
    let b = CMatrix::from_fn(n, n, |i, j| {
        C64::new(if i == j { (nf - 1.0) / nf - 1.0 / nf } else { -1.0 / nf }, 0.0)
    });
    let eig = hermitian_eigs(&b, true).unwrap().eigenvalues;
    assert!((eig[0] + 1.0 / nf).abs() < 1e-14);
    for e in &eig[1..] {
        assert!((e - (nf - 1.0) / nf).abs() < 1e-14);
    }
}

#[test]
fn slightly_non_hermitian_input_is_tolerated_up_to_limit() {
    let mut a = random_hermitian(4, 3);
    a[(0, 1)] += C64::new(5e-9, 0.0);
    assert!(hermitian_eigs(&a, false).is_ok());
    a[(0, 1)] += C64::new(1e-8, 0.0);
    assert!(hermitian_eigs(&a, false).is_err());
}

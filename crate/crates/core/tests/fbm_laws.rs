use proptest::prelude::*;

use stochastic_channel::fbm::{
    covariance_matrix, fbm_covariance, increments, sample_boundary_noise, sample_fbm, CholeskyFbm, DaviesHarte,
    NoiseCoefficients,
};

fn implied_covariance(apply: impl Fn(&[f64]) -> Vec<f64>, inputs: usize, n: usize) -> Vec<f64> {
    let cols: Vec<Vec<f64>> = (0..inputs)
        .map(|j| {
            let mut e = vec![0.0; inputs];
            e[j] = 1.0;
            apply(&e)
        })
        .collect();
    let mut c = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            c[a * n + b] = cols.iter().map(|col| col[a + 1] * col[b + 1]).sum();
        }
    }
    c
}

#[test]
fn samplers_agree_on_small_grid() {
    for h in [0.55, 0.7, 0.85, 0.95] {
        let n = 8;
        let dh = DaviesHarte::new(h, 2.0, n).unwrap();
        let ch = CholeskyFbm::new(h, 2.0, n).unwrap();
        let a = implied_covariance(|e| dh.apply(e).values, dh.input_len(), n);
        let b = implied_covariance(|e| ch.apply(e).values, ch.input_len(), n);
        let exact = covariance_matrix(h, 2.0, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((a[i * n + j] - b[i * n + j]).abs() < 1e-10);
                assert!((a[i * n + j] - exact[(i, j)]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn increments_are_stationary() {
    // Cov(ΔB_i, ΔB_j) depends on |i - j| only.
    let (h, n) = (0.8, 12);
    let ch = CholeskyFbm::new(h, 1.0, n).unwrap();
    let c = implied_covariance(|e| ch.apply(e).values, ch.input_len(), n);
    let cov = |a: usize, b: usize| if a == 0 || b == 0 { 0.0 } else { c[(a - 1) * n + (b - 1)] };
    let inc = |i: usize, j: usize| cov(i + 1, j + 1) - cov(i + 1, j) - cov(i, j + 1) + cov(i, j);
    for lag in 0..n {
        let first = inc(0, lag);
        for i in 1..n - lag {
            assert!((inc(i, i + lag) - first).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_deterministic(h in 0.51f64..0.99, n in 1usize..64, seed in any::<u64>()) {
        let a = sample_fbm(h, 1.0, n, seed).unwrap();
        let b = sample_fbm(h, 1.0, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.values[0], 0.0);
        prop_assert_eq!(a.values.len(), n + 1);
    }

    #[test]
    fn increments_telescope(h in 0.51f64..0.99, n in 1usize..64, seed in any::<u64>()) {
        let p = sample_fbm(h, 1.5, n, seed).unwrap();
        let mut acc = 0.0;
        for (k, d) in increments(&p).iter().enumerate() {
            acc += d;
            prop_assert_eq!(acc, p.values[k + 1]);
        }
    }

    #[test]
    fn covariance_is_self_similar(h in 0.51f64..0.99, s in 0.01f64..5.0, t in 0.01f64..5.0, c in 0.1f64..10.0) {
        let lhs = fbm_covariance(c * s, c * t, h).unwrap();
        let rhs = c.powf(2.0 * h) * fbm_covariance(s, t, h).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        prop_assert_eq!(fbm_covariance(s, t, h).unwrap(), fbm_covariance(t, s, h).unwrap());
    }

    #[test]
    fn noise_is_hermitian(seed in any::<u64>(), cutoff in 1usize..6) {
        let coeffs = NoiseCoefficients::power_law(0.2, 0.5, cutoff, 0.0);
        let noise = sample_boundary_noise(&coeffs, 0.75, 1.0, 16, seed).unwrap();
        for k in 0..=16 {
            prop_assert_eq!(noise.coefficient(0, k).im, 0.0);
            for n in 1..=cutoff as i64 {
                prop_assert_eq!(noise.coefficient(-n, k), noise.coefficient(n, k).conj());
            }
            prop_assert_eq!(noise.coefficient(cutoff as i64 + 1, k).norm(), 0.0);
        }
    }
}

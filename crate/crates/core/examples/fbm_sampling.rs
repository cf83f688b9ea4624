//! Exact fBm sampling: circulant embedding against the dense Cholesky
//! sampler, and the Hurst parameter recovered from sampled paths.
//!
//! ```text
//! cargo run --release --example fbm_sampling
//! ```

use stochastic_channel::fbm::{
    covariance_matrix, derive_seed, estimate_hurst, sample_boundary_noise, CholeskyFbm, DaviesHarte,
    NoiseCoefficients,
};

fn main() {
    let (h, horizon, n) = (0.75, 1.0, 16);
    // both samplers are linear maps of standard normals; compare L Lᵀ with the exact covariance
    let exact = covariance_matrix(h, horizon, n).unwrap();
    let dh = DaviesHarte::new(h, horizon, n).unwrap();
    let chol = CholeskyFbm::new(h, horizon, n).unwrap();
    for (name, m) in [("davies-harte", dh.input_len()), ("cholesky", chol.input_len())] {
        let mut cols = Vec::new();
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            let path = if name == "cholesky" { chol.apply(&e) } else { dh.apply(&e) };
            cols.push(path.values[1..].to_vec());
        }
        let mut err: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let c: f64 = cols.iter().map(|col| col[a] * col[b]).sum();
                err = err.max((c - exact[(a, b)]).abs());
            }
        }
        println!("{name:>13}: max covariance error {err:.2e}");
    }

    for h in [0.6, 0.75, 0.9] {
        let paths: Vec<_> = (0..200).map(|i| DaviesHarte::new(h, 1.0, 1024).unwrap().sample(derive_seed(1, i))).collect();
        println!("H = {h}: variogram estimate {:.3}", estimate_hurst(&paths, 16).unwrap());
    }

    let coeffs = NoiseCoefficients::power_law(0.1, 0.5, 8, 0.0);
    let noise = sample_boundary_noise(&coeffs, 0.9, 0.5, 500, 42).unwrap();
    println!("boundary noise: {} scalar paths, ĝ_3(T) = {:.4}", noise.paths.len(), noise.coefficient(3, 500));
}

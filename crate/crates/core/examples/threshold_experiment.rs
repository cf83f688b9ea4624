//! Refinement study of `sup_t ‖w_g‖_(L^2q)` for one `q` below and one
//! above the critical exponent, under pure `z`-refinement and with the time
//! step refined along with the grid.
//!
//! ```text
//! cargo run --release --example threshold_experiment
//! ```

use stochastic_channel::diagnostics::{threshold_experiment, Resolution};
use stochastic_channel::exponents::{critical_integrability, NoiseParams};
use stochastic_channel::fbm::{sample_boundary_noise, NoiseCoefficients};
use stochastic_channel::spectral::TimeScheme;

fn main() {
    let q_h = critical_integrability(&NoiseParams::new(0.9, 0.0).unwrap()).unwrap();
    println!("q_H = {q_h:.4}");
    let coeffs = NoiseCoefficients::power_law(0.1, 0.5, 8, 0.0);
    let noise = sample_boundary_noise(&coeffs, 0.9, 0.5, 2000, 0).unwrap();
    let z_only = [65, 129, 257].map(|n_z| Resolution { n_z, noise_stride: 4 });
    let coupled = [(65, 16), (129, 4), (257, 1)].map(|(n_z, noise_stride)| Resolution { n_z, noise_stride });
    for (name, res) in [("z only", z_only), ("z and dt", coupled)] {
        println!("{name}:");
        for row in threshold_experiment(&noise, 32, 1.0, &[1.05, 1.9], &res, TimeScheme::ImplicitEuler).unwrap() {
            println!("  q = {:<4} n_z = {:>3} dt = {:.1e}: {:.6} ({:?})", row.q, row.n_z, row.dt, row.sup_norm, row.class);
        }
    }
}

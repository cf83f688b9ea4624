//! The stochastic convolution `w_g` driven by fBm on the upper wall:
//! `L^{2q}` norms, the near-wall blow-up profile and the Hölder fit.
//!
//! ```text
//! cargo run --release --example boundary_convolution
//! ```

use stochastic_channel::convolution::{boundary_blowup_profile, evolve_convolution, holder_estimate, norm_trajectory};
use stochastic_channel::fbm::{sample_boundary_noise, NoiseCoefficients};
use stochastic_channel::spectral::{ChannelGrid, TimeScheme};

fn main() {
    let grid = ChannelGrid::with_dims(32, 65, 1.0).unwrap();
    let coeffs = NoiseCoefficients::power_law(0.1, 0.5, 8, 0.0);
    let noise = sample_boundary_noise(&coeffs, 0.9, 0.5, 500, 7).unwrap();
    let traj = evolve_convolution(&noise, &grid, noise.dt(), TimeScheme::ImplicitEuler).unwrap();
    println!("{} states, spectral tail {:.1e}", traj.len(), traj.max_tail);

    for q in [1.05, 1.4, 1.9] {
        let norms = norm_trajectory(&traj, q);
        let sup = norms.iter().cloned().fold(0.0, f64::max);
        println!("q = {q}: sup_t ‖w_g‖_(L^2q) = {sup:.4}, at T: {:.4}", norms.last().unwrap());
    }

    let profile = boundary_blowup_profile(&traj, 2.0);
    println!("time-averaged ‖w_g(·, z)‖_(L²(x)):");
    for j in (0..grid.n_z()).step_by(8) {
        println!("  z = {:.3}: {:.4e}", grid.z()[j], profile[j]);
    }
    println!("Hölder exponent in time (L² increments): {:.3}", holder_estimate(&traj, 0.0).unwrap());
}

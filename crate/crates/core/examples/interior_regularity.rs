//! Windowed spectral decay of `u` away from and next to the noisy wall.
//!
//! ```text
//! cargo run --release --example interior_regularity
//! ```

use stochastic_channel::convolution::evolve_convolution;
use stochastic_channel::diagnostics::{interior_decay_probe, vorticity_snapshot, Window};
use stochastic_channel::exponents::{ExponentLedger, NoiseParams};
use stochastic_channel::fbm::{sample_boundary_noise, NoiseCoefficients};
use stochastic_channel::solver::{assemble, run_splitting, StepOptions, WPath};
use stochastic_channel::spectral::{ChannelGrid, TimeScheme};
use stochastic_channel::testing::default_initial_velocity;

fn main() {
    let grid = ChannelGrid::with_dims(32, 65, 1.0).unwrap();
    let ledger = ExponentLedger::new(NoiseParams::new(0.9, 0.0).unwrap(), 2.8).unwrap();
    let coeffs = NoiseCoefficients::power_law(0.1, 0.5, 8, 0.0);
    let u_in = default_initial_velocity(&grid);
    for seed in 0..3 {
        let noise = sample_boundary_noise(&coeffs, 0.9, 0.5, 500, seed).unwrap();
        let traj = evolve_convolution(&noise, &grid, noise.dt(), TimeScheme::ImplicitEuler).unwrap();
        let w = WPath::Series(traj.wg_states);
        let state = run_splitting(&u_in, &w, &ledger, &StepOptions::new(1e-3, 500)).unwrap();
        let u = &assemble(&state, &w)[250];
        let interior = interior_decay_probe(u, &Window::interior(1.0)).unwrap();
        let wall = interior_decay_probe(u, &Window::upper_wall(1.0)).unwrap();
        let omega = vorticity_snapshot(u);
        println!("seed {seed}: interior rate {interior:.3}, upper-wall rate {wall:.3}, ‖ω‖ = {:.3}", omega.l2_norm());
    }
}

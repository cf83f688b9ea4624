//! Full splitting run on the desk-scale configuration: cascade levels,
//! remainder, energy bookkeeping and the monolithic cross-check.
//!
//! ```text
//! cargo run --release --example splitting_run
//! ```

use stochastic_channel::convolution::evolve_convolution;
use stochastic_channel::exponents::{ExponentLedger, NoiseParams};
use stochastic_channel::fbm::{sample_boundary_noise, NoiseCoefficients};
use stochastic_channel::solver::{
    assemble, energy_residual, run_splitting, solve_direct, telescoping_residual, trajectory_distance, StepOptions,
    WPath,
};
use stochastic_channel::spectral::{ChannelGrid, TimeScheme};
use stochastic_channel::testing::default_initial_velocity;

fn main() {
    let grid = ChannelGrid::with_dims(32, 65, 1.0).unwrap();
    let ledger = ExponentLedger::new(NoiseParams::new(0.9, 0.0).unwrap(), 2.8).unwrap();
    println!("depth N = {}, q_i = {:?}", ledger.depth, ledger.stokes_exps);

    let noise = sample_boundary_noise(&NoiseCoefficients::power_law(0.1, 0.5, 8, 0.0), 0.9, 0.5, 500, 42).unwrap();
    let traj = evolve_convolution(&noise, &grid, noise.dt(), TimeScheme::ImplicitEuler).unwrap();
    let w = WPath::Series(traj.wg_states);
    let u_in = default_initial_velocity(&grid);
    let opts = StepOptions::new(1e-3, 500);

    let state = run_splitting(&u_in, &w, &ledger, &opts).unwrap();
    for (i, lvl) in state.cascade.iter().enumerate() {
        println!("‖v_{i}(T)‖ = {:.4e}", lvl[500].l2_norm());
    }
    println!("‖v̄(T)‖ = {:.4}", state.remainder[500].l2_norm());

    let energy = energy_residual(&state.remainder, &state.cascade, &w, opts.dt);
    println!("max energy residual {:.3e}", energy.iter().cloned().fold(0.0, f64::max));
    let levels: Vec<_> = state.cascade.iter().map(|l| l[250].clone()).collect();
    println!(
        "telescoping residual at T/2: {:.2e}",
        telescoping_residual(&levels, &state.remainder[250], w.at(250), opts.form)
    );

    let u = assemble(&state, &w);
    let v: Vec<_> = u.iter().enumerate().map(|(k, uk)| uk - w.at(k)).collect();
    let direct = solve_direct(&u_in, &w, &opts).unwrap();
    println!("splitting vs direct: {:.2e}", trajectory_distance(&v, &direct));
}

//! Stationary Stokes lift of wall data `u = (g, 0)` on `z = a`.
//!
//! ```text
//! cargo run --example dirichlet_lift
//! ```

use num_complex::Complex64;
use stochastic_channel::dirichlet::{dirichlet_lift, lift_norm_ratio, BoundaryDatum, LiftProfile};
use stochastic_channel::spectral::{divergence, ChannelGrid};

fn main() {
    let grid = ChannelGrid::with_dims(256, 65, 1.0).unwrap();

    // k = 0: Couette flow u_1 = g_0 z / a
    let couette = dirichlet_lift(&BoundaryDatum::constant(1.0), &grid).unwrap();
    let top = couette.mode1(0)[grid.n_z() - 1].re;
    println!("Couette: u_1(a) = {top:.12}");

    for k in [1usize, 4, 16] {
        let p = LiftProfile::new(k, 1.0).unwrap();
        let worst = (0..=20).map(|i| p.stokes_residual(i as f64 / 20.0).abs()).fold(0.0, f64::max);
        println!("k = {k:>2}: ψ'(a) = {:.6}, max |(∂² - k²)² ψ| = {worst:.2e}", p.derivative(1.0, 1));
    }

    // lift norm against the H^{-1/2} norm of the data: bounded as the mode grows
    for n in [1i64, 4, 16, 64] {
        let g = BoundaryDatum::single_mode(n, Complex64::new(1.0, 0.0));
        let u = dirichlet_lift(&g, &grid).unwrap();
        println!(
            "mode {n:>2}: ‖Dg‖/‖g‖_(-1/2) = {:.4}, ‖div Dg‖ = {:.1e}",
            lift_norm_ratio(&g, &grid).unwrap(),
            divergence(&u).l2_norm()
        );
    }
}

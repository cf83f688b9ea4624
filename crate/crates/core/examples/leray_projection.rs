//! Leray projection on the channel grid: idempotency, divergence removal
//! and annihilation of gradients.
//!
//! ```text
//! cargo run --example leray_projection
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_channel::spectral::{divergence, helmholtz_split, leray_project, ChannelGrid};
use stochastic_channel::testing::{gradient_field, random_smooth_field};

fn main() {
    let grid = ChannelGrid::with_dims(32, 65, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_smooth_field(&grid, &mut rng, 6, 8);
    let p = leray_project(&f);
    let pp = leray_project(&p);
    println!("‖f‖ = {:.4}, ‖Pf‖ = {:.4}", f.l2_norm(), p.l2_norm());
    println!("idempotency ‖PPf - Pf‖/‖Pf‖ = {:.2e}", (&pp - &p).l2_norm() / p.l2_norm());
    println!("‖div f‖ = {:.3e}, ‖div Pf‖ = {:.3e}", divergence(&f).l2_norm(), divergence(&p).l2_norm());

    let g = gradient_field(&grid, &mut rng, 6, 8);
    println!("‖P∇φ‖/‖∇φ‖ = {:.2e}", leray_project(&g).l2_norm() / g.l2_norm());

    let (sol, potential) = helmholtz_split(&f);
    println!("Helmholtz split: ‖Pf‖ = {:.4}, ‖φ‖ = {:.4}", sol.l2_norm(), potential.l2_norm());
}

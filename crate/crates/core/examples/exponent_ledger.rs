//! Exponent bookkeeping for a few noise/integrability choices.
//!
//! ```text
//! cargo run --example exponent_ledger
//! ```

use stochastic_channel::exponents::{critical_integrability, splitting_depth, ExponentLedger, NoiseParams};

fn main() {
    for (h, s, r) in [(0.9, 0.0, 2.8), (0.95, 0.0, 3.0), (0.95, 0.0, 2.8), (0.8, 0.05, 2.5)] {
        let noise = NoiseParams::new(h, s).expect("admissible noise");
        let q_star = critical_integrability(&noise).unwrap();
        println!("H = {h}, s = {s}: q_H = {q_star:.6}, r = {r} gives N = {}", splitting_depth(r).unwrap());
        match ExponentLedger::new(noise, r) {
            Ok(l) => {
                println!("  q_i = {:?}", l.stokes_exps);
                println!("  r_i = {:?}", l.lebesgue_exps);
                println!("  p_min = {:.4}, chain defect = {:.1e}", l.p_min, l.chain_defect());
            }
            Err(e) => println!("  rejected: {e}"),
        }
    }
}

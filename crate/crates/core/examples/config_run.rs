//! Drives a pipeline from a config, the same way the command-line tool
//! does, and reads a snapshot back.
//!
//! ```text
//! cargo run --release --example config_run -- /tmp/channel-run
//! ```

use std::path::PathBuf;

use stochastic_channel::config::RunConfig;
use stochastic_channel::run::{execute, Command};
use stochastic_channel::snapshot::Snapshot;

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "channel-run".into()));
    let config = RunConfig::parse(
        r#"
r = 2.8
seed = 11

[grid]
n_x = 16
n_z = 33
height = 1.0

[noise]
mode_cutoff = 4

[time]
horizon = 0.1
dt = 1e-3

[output]
snapshot_times = [0.1]
snapshot_format = "binary"
"#,
        "inline",
    )
    .unwrap();
    let manifest = execute(Command::RunFull, &config, &out).unwrap();
    println!("config sha256 {}", manifest.config_sha256);
    println!("summary {}", manifest.summary);
    for f in &manifest.outputs {
        println!("  {}", out.join(f).display());
    }
    let snap = Snapshot::read(&out.join("snapshots/u_t0.100000.json")).unwrap();
    let max = snap.data[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("snapshot at t = {}: max |u_1| = {max:.4}", snap.header.time);
}

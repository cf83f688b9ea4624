//! Pipelines behind the command-line tool: each one validates the config,
//! computes everything in memory, then writes its files and `manifest.json`.
//! Nothing is written if validation or the computation fails.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::convolution::{
    boundary_blowup_profile, evolve_convolution, holder_estimate, weak_form_residual, ConvolutionSummary,
    ConvolutionTrajectory,
};
use crate::diagnostics::{
    hurst_recovery_report, interior_decay_probe, threshold_experiment, vorticity_snapshot, Resolution, ThresholdRow,
};
use crate::exponents::ExponentLedger;
use crate::fbm::{sample_boundary_noise, CylindricalBoundaryNoise};
use crate::snapshot::Snapshot;
use crate::solver::{
    assemble, energy_residual, run_splitting, solve_direct, telescoping_residual, SplittingState, StepOptions, WPath,
};
use crate::spectral::{gradient_energy, lebesgue_norm, ChannelGrid, VelocityField};
use crate::testing::default_initial_velocity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Exponents,
    SampleNoise,
    RunLinear,
    RunFull,
    Diagnostics,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Exponents,
        Command::SampleNoise,
        Command::RunLinear,
        Command::RunFull,
        Command::Diagnostics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Exponents => "exponents",
            Command::SampleNoise => "sample-noise",
            Command::RunLinear => "run-linear",
            Command::RunFull => "run-full",
            Command::Diagnostics => "diagnostics",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("output encoding failed: {0}")]
    Encode(String),
}

impl RunError {
    /// 2 for validation errors, 3 for numerical aborts, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            _ => 1,
        }
    }
}

fn numerical(e: impl fmt::Display) -> RunError {
    RunError::Numerical(e.to_string())
}

fn encode(e: impl fmt::Display) -> RunError {
    RunError::Encode(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubSeed {
    pub mode: usize,
    pub part: usize,
    pub stream: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: Command,
    pub version: String,
    pub config_sha256: String,
    pub config: RunConfig,
    pub seed: u64,
    pub sampler: Option<String>,
    pub sub_seeds: Vec<SubSeed>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

/// SHA-256 of the config's canonical JSON encoding, hex.
pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files produced by a pipeline, held until the computation has finished.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    snapshots: Vec<(String, Snapshot)>,
}

impl Outputs {
    fn csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<(), RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(encode)?;
        }
        let bytes = w.into_inner().map_err(encode)?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let text = serde_json::to_string_pretty(value).map_err(encode)?;
        self.files.push((name.to_string(), text.into_bytes()));
        Ok(())
    }

    fn write(mut self, dir: &Path) -> Result<Vec<String>, RunError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| RunError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut names = Vec::new();
        for (name, bytes) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, bytes).map_err(io(&p))?;
            names.push(name.clone());
        }
        if !self.snapshots.is_empty() {
            let sub = dir.join("snapshots");
            std::fs::create_dir_all(&sub).map_err(io(&sub))?;
            for (stem, snap) in &mut self.snapshots {
                let (h, d) = snap.write(&sub, stem).map_err(encode)?;
                for p in [h, d] {
                    let rel = p.strip_prefix(dir).unwrap_or(&p);
                    names.push(rel.display().to_string());
                }
            }
        }
        Ok(names)
    }
}

#[derive(Serialize)]
struct NoiseRow {
    time: f64,
    mode: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct NormRow {
    time: f64,
    q: f64,
    norm: f64,
}

#[derive(Serialize)]
struct ProfileRow {
    z: f64,
    q: f64,
    value: f64,
}

#[derive(Serialize)]
struct SeriesRow {
    time: f64,
    value: f64,
}

#[derive(Serialize)]
struct LevelRow<'a> {
    time: f64,
    level: &'a str,
    l2: f64,
    grad_l2: f64,
}

#[derive(Serialize)]
struct DecayRow<'a> {
    window: &'a str,
    time: f64,
    x0: f64,
    x1: f64,
    z0: f64,
    z1: f64,
    rate: f64,
}

fn sample_noise(config: &RunConfig) -> Result<CylindricalBoundaryNoise, RunError> {
    let n = &config.noise;
    sample_boundary_noise(&n.coefficients(), n.hurst, config.time.horizon, config.n_steps(), config.seed)
        .map_err(numerical)
}

fn grid_of(config: &RunConfig) -> Result<ChannelGrid, RunError> {
    ChannelGrid::new(config.grid).map_err(|e| RunError::Config(ConfigError::Invalid {
        field: "grid",
        message: e.to_string(),
    }))
}

fn linear(config: &RunConfig, noise: &CylindricalBoundaryNoise) -> Result<ConvolutionTrajectory, RunError> {
    let grid = grid_of(config)?;
    let traj = evolve_convolution(noise, &grid, config.time.dt, config.scheme).map_err(numerical)?;
    if traj.under_resolved {
        log::warn!("w_g is under-resolved in z (relative tail {:.2e})", traj.max_tail);
    }
    Ok(traj)
}

fn step_options(config: &RunConfig) -> StepOptions {
    StepOptions {
        scheme: config.scheme,
        form: config.form,
        ..StepOptions::new(config.time.dt, config.n_steps())
    }
}

fn step_index(config: &RunConfig, t: f64) -> usize {
    ((t / config.time.dt).round() as usize).min(config.n_steps())
}

fn run_exponents(ledger: &ExponentLedger, out: &mut Outputs) -> Result<serde_json::Value, RunError> {
    out.json("exponents.json", ledger)?;
    Ok(serde_json::json!({ "depth": ledger.depth, "q_star": ledger.q_star, "chain_defect": ledger.chain_defect() }))
}

fn write_noise(noise: &CylindricalBoundaryNoise, out: &mut Outputs) -> Result<(), RunError> {
    let cutoff = noise.coefficients.mode_cutoff as i64;
    let dt = noise.dt();
    let rows = (0..=noise.n_steps).flat_map(|k| {
        (0..=cutoff).map(move |n| {
            let c = noise.coefficient(n, k);
            NoiseRow {
                time: k as f64 * dt,
                mode: n,
                re: c.re,
                im: c.im,
            }
        })
    });
    out.csv("noise.csv", rows)
}

fn run_linear(config: &RunConfig, noise: &CylindricalBoundaryNoise, out: &mut Outputs) -> Result<serde_json::Value, RunError> {
    let traj = linear(config, noise)?;
    let o = &config.output;
    let rows = traj.times.iter().zip(&traj.wg_states).flat_map(|(&t, w)| {
        o.norm_q.iter().map(move |&q| NormRow {
            time: t,
            q,
            norm: lebesgue_norm(w, 2.0 * q),
        })
    });
    out.csv("w_norms.csv", rows)?;
    let profile = boundary_blowup_profile(&traj, o.blowup_q);
    let z = traj.wg_states[0].grid.z().to_vec();
    out.csv(
        "blowup_profile.csv",
        z.iter().zip(profile).map(|(&z, value)| ProfileRow {
            z,
            q: o.blowup_q,
            value,
        }),
    )?;
    let phi = default_initial_velocity(&traj.wg_states[0].grid);
    let weak = weak_form_residual(&traj, &phi, noise);
    out.csv(
        "weak_residual.csv",
        traj.times.iter().zip(&weak).map(|(&time, &value)| SeriesRow { time, value }),
    )?;
    let summary = ConvolutionSummary {
        n_steps: traj.len() - 1,
        dt: traj.dt(),
        max_tail: traj.max_tail,
        under_resolved: traj.under_resolved,
        holder_exponent: holder_estimate(&traj, o.holder_gamma).ok(),
    };
    out.json("holder.json", &summary)?;
    Ok(serde_json::json!({
        "holder_exponent": summary.holder_exponent,
        "max_weak_residual": weak.iter().cloned().fold(0.0, f64::max),
        "max_tail": traj.max_tail,
    }))
}

fn level_rows(state: &SplittingState, w: &WPath, u: &[VelocityField]) -> Vec<(f64, String, f64, f64)> {
    let mut rows = Vec::new();
    let norms = |f: &VelocityField| (f.l2_norm(), gradient_energy(f).sqrt());
    for (k, &t) in state.times.iter().enumerate() {
        let mut push = |name: String, f: &VelocityField| {
            let (a, b) = norms(f);
            rows.push((t, name, a, b));
        };
        push("w".into(), w.at(k));
        for (i, lvl) in state.cascade.iter().enumerate() {
            push(format!("v{i}"), &lvl[k]);
        }
        push("vbar".into(), &state.remainder[k]);
        push("u".into(), &u[k]);
    }
    rows
}

struct FullRun {
    traj_w: WPath,
    state: SplittingState,
    u: Vec<VelocityField>,
}

fn full(config: &RunConfig, ledger: &ExponentLedger, noise: &CylindricalBoundaryNoise) -> Result<FullRun, RunError> {
    let traj = linear(config, noise)?;
    let w = WPath::Series(traj.wg_states);
    let u_in = default_initial_velocity(w.grid());
    let state = run_splitting(&u_in, &w, ledger, &step_options(config)).map_err(numerical)?;
    let u = assemble(&state, &w);
    Ok(FullRun { traj_w: w, state, u })
}

fn run_full(
    config: &RunConfig,
    ledger: &ExponentLedger,
    noise: &CylindricalBoundaryNoise,
    out: &mut Outputs,
) -> Result<serde_json::Value, RunError> {
    let FullRun { traj_w: w, state, u } = full(config, ledger, noise)?;
    let rows = level_rows(&state, &w, &u);
    out.csv(
        "level_norms.csv",
        rows.iter().map(|(time, level, l2, grad_l2)| LevelRow {
            time: *time,
            level,
            l2: *l2,
            grad_l2: *grad_l2,
        }),
    )?;
    let energy = energy_residual(&state.remainder, &state.cascade, &w, config.time.dt);
    out.csv(
        "energy_residual.csv",
        state.times.iter().zip(&energy).map(|(&time, &value)| SeriesRow { time, value }),
    )?;
    let tele: Vec<f64> = (0..state.times.len())
        .map(|k| {
            let levels: Vec<VelocityField> = state.cascade.iter().map(|l| l[k].clone()).collect();
            telescoping_residual(&levels, &state.remainder[k], w.at(k), config.form)
        })
        .collect();
    out.csv(
        "telescoping_residual.csv",
        state.times.iter().zip(&tele).map(|(&time, &value)| SeriesRow { time, value }),
    )?;
    for &t in &config.output.snapshot_times {
        let k = step_index(config, t);
        let time = state.times[k];
        let fmt = config.output.snapshot_format;
        out.snapshots
            .push((format!("u_t{time:.6}"), Snapshot::from_velocity(&u[k], time, fmt)));
        out.snapshots.push((
            format!("vorticity_t{time:.6}"),
            Snapshot::from_scalar(&vorticity_snapshot(&u[k]), "omega", time, fmt),
        ));
    }
    let mut summary = serde_json::json!({
        "depth": ledger.depth,
        "max_energy_residual": energy.iter().cloned().fold(0.0, f64::max),
        "max_telescoping_residual": tele.iter().cloned().fold(0.0, f64::max),
    });
    if config.output.compare_direct {
        let direct = solve_direct(&state.initial, &w, &step_options(config)).map_err(numerical)?;
        let dist: Vec<f64> = (0..u.len())
            .map(|k| {
                let v = &u[k] - w.at(k);
                let d = (&v - &direct[k]).l2_norm();
                let s = v.l2_norm().max(direct[k].l2_norm());
                if s == 0.0 {
                    0.0
                } else {
                    d / s
                }
            })
            .collect();
        out.csv(
            "splitting_vs_direct.csv",
            state.times.iter().zip(&dist).map(|(&time, &value)| SeriesRow { time, value }),
        )?;
        summary["max_splitting_vs_direct"] = dist.iter().cloned().fold(0.0, f64::max).into();
    }
    Ok(summary)
}

fn run_diagnostics(
    config: &RunConfig,
    ledger: &ExponentLedger,
    noise: &CylindricalBoundaryNoise,
    out: &mut Outputs,
) -> Result<serde_json::Value, RunError> {
    let traj = linear(config, noise)?;
    let hurst = hurst_recovery_report(noise, &traj);
    out.json("hurst_report.json", &hurst)?;
    drop(traj);

    let FullRun { u, state, .. } = full(config, ledger, noise)?;
    let t_probe = config.diagnostics.probe_time.unwrap_or(0.5 * config.time.horizon);
    let k = step_index(config, t_probe);
    let time = state.times[k];
    let mut decay = Vec::new();
    for (name, win) in [("interior", config.interior_window()), ("upper-wall", config.wall_window())] {
        let rate = interior_decay_probe(&u[k], &win).map_err(numerical)?;
        decay.push((name, win, rate));
    }
    out.csv(
        "interior_decay.csv",
        decay.iter().map(|(window, w, rate)| DecayRow {
            window,
            time,
            x0: w.x0,
            x1: w.x1,
            z0: w.z0,
            z1: w.z1,
            rate: *rate,
        }),
    )?;
    out.snapshots.push((
        format!("vorticity_t{time:.6}"),
        Snapshot::from_scalar(&vorticity_snapshot(&u[k]), "omega", time, config.output.snapshot_format),
    ));

    let res: Vec<Resolution> = config
        .diagnostics
        .threshold_n_z
        .iter()
        .map(|&n_z| Resolution { n_z, noise_stride: 1 })
        .collect();
    let table: Vec<ThresholdRow> = threshold_experiment(
        noise,
        config.grid.n_x,
        config.grid.height,
        &config.diagnostics.threshold_q,
        &res,
        config.scheme,
    )
    .map_err(numerical)?;
    out.csv("threshold_table.csv", &table)?;
    let classes: Vec<_> = table
        .iter()
        .filter(|r| r.n_z == res[0].n_z)
        .map(|r| serde_json::json!({ "q": r.q, "class": r.class }))
        .collect();
    Ok(serde_json::json!({
        "interior_rate": decay[0].2,
        "wall_rate": decay[1].2,
        "threshold": classes,
        "hurst_estimate": hurst.hurst_estimate,
        "holder_exponent": hurst.holder_exponent,
    }))
}

/// Validates `config`, runs `command` and writes its outputs and
/// `manifest.json` into `out_dir`.
pub fn execute(command: Command, config: &RunConfig, out_dir: &Path) -> Result<Manifest, RunError> {
    let ledger = config.validate()?;
    let clock = Instant::now();
    let mut out = Outputs::default();
    let mut noise = None;
    let summary = match command {
        Command::Exponents => run_exponents(&ledger, &mut out)?,
        _ => {
            let n = sample_noise(config)?;
            let summary = match command {
                Command::SampleNoise => {
                    write_noise(&n, &mut out)?;
                    serde_json::json!({ "n_paths": n.paths.len(), "n_steps": n.n_steps })
                }
                Command::RunLinear => run_linear(config, &n, &mut out)?,
                Command::RunFull => run_full(config, &ledger, &n, &mut out)?,
                Command::Diagnostics => run_diagnostics(config, &ledger, &n, &mut out)?,
                Command::Exponents => unreachable!(),
            };
            noise = Some(n);
            summary
        }
    };
    let outputs = out.write(out_dir)?;
    let sub_seeds = noise
        .as_ref()
        .map(|n| {
            n.paths
                .iter()
                .map(|p| SubSeed {
                    mode: p.mode,
                    part: p.part,
                    stream: p.stream,
                    seed: p.seed,
                })
                .collect()
        })
        .unwrap_or_default();
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: config_hash(config),
        config: config.clone(),
        seed: config.seed,
        sampler: noise.as_ref().map(|_| "davies-harte".to_string()),
        sub_seeds,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        outputs,
        summary,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(encode)?;
    std::fs::write(&path, text).map_err(|source| RunError::Io { path, source })?;
    Ok(manifest)
}

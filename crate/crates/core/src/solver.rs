//! The splitting architecture for `∂_t v + A v + B(v + w, v + w) = 0`,
//! `v(0) = u_in`: linear cascade levels `v_0 .. v_{N-1}` driven by the
//! boundary convolution `w`, a nonlinear remainder `v̄`, and a monolithic
//! solver for cross-validation.
//!
//! With partial sums `V_i = w + Σ_{j<i} v_j` the level forcings are
//! `B(w, w)` for level 0 and `B(v_{i-1}, V_i) + B(V_{i-1}, v_{i-1})` for
//! level `i`; the remainder carries
//! `B(v̄,v̄) + B(v̄,V_N) + B(V_N,v̄) + B(v_{N-1},V_N) + B(V_{N-1},v_{N-1})`.
//!
//! All equations are stepped IMEX: the Stokes part implicitly, the forcing
//! at the left time point. Since the Stokes step absorbs gradients, forcings
//! are passed unprojected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::ExponentLedger;
use crate::spectral::{
    gradient_energy, nonlinear_term, sum_fields, trilinear_b, ChannelGrid, NonlinearForm,
    SpectralError, StokesStepper, TimeScheme, VelocityField,
};

/// Which equation a solver error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Cascade(usize),
    Remainder,
    Direct,
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Cascade(i) => write!(f, "cascade level {i}"),
            Level::Remainder => write!(f, "remainder"),
            Level::Direct => write!(f, "direct solve"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("non-finite values in {level} at step {step}")]
    NonFinite { level: Level, step: usize },
    #[error("CFL number {cfl:.3} exceeds {limit} in {level} at step {step}; reduce dt")]
    Cfl {
        level: Level,
        step: usize,
        cfl: f64,
        limit: f64,
    },
    #[error("Picard iteration does not contract on a slab of {slab_steps} step(s) starting at step {start}; shorten the slab")]
    NonContraction { start: usize, slab_steps: usize },
    #[error("expected {expected} cascade levels, got {got}")]
    DepthMismatch { expected: usize, got: usize },
    #[error("trajectory length mismatch: {0}")]
    Length(String),
}

/// Time-stepping options shared by every equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepOptions {
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub scheme: TimeScheme,
    #[serde(default = "default_form")]
    pub form: NonlinearForm,
    /// Abort when `dt · max(|u_1|/Δx + |u_2|/Δz)` of the transport velocity exceeds this.
    #[serde(default = "default_cfl")]
    pub cfl_limit: f64,
}

fn default_form() -> NonlinearForm {
    NonlinearForm::Skew
}

fn default_cfl() -> f64 {
    2.0
}

impl StepOptions {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        Self {
            dt,
            n_steps,
            scheme: TimeScheme::ImplicitEuler,
            form: default_form(),
            cfl_limit: default_cfl(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| k as f64 * self.dt).collect()
    }
}

/// The convolution `w` as seen by the solver: a stored series or a single
/// field held constant in time.
#[derive(Debug, Clone)]
pub enum WPath {
    Frozen { field: VelocityField, n_steps: usize },
    Series(Vec<VelocityField>),
}

impl WPath {
    pub fn at(&self, k: usize) -> &VelocityField {
        match self {
            WPath::Frozen { field, .. } => field,
            WPath::Series(s) => &s[k],
        }
    }

    /// Number of states (`n_steps + 1`).
    pub fn len(&self) -> usize {
        match self {
            WPath::Frozen { n_steps, .. } => n_steps + 1,
            WPath::Series(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grid(&self) -> &ChannelGrid {
        &self.at(0).grid
    }

    pub fn zeros(grid: &ChannelGrid, n_steps: usize) -> Self {
        WPath::Frozen {
            field: VelocityField::zeros(grid),
            n_steps,
        }
    }
}

/// `dt · max_{x,z} (|u_1|/Δx + |u_2|/Δz_j)` with `Δz_j` the local node spacing.
pub fn cfl_number(u: &VelocityField, dt: f64) -> f64 {
    let grid = &u.grid;
    let (p1, p2) = u.to_physical();
    let nz = grid.n_z();
    let z = grid.z();
    let dx = 2.0 * std::f64::consts::PI / grid.n_x() as f64;
    let dz: Vec<f64> = (0..nz)
        .map(|j| {
            let lo = if j > 0 { z[j] - z[j - 1] } else { f64::INFINITY };
            let hi = if j + 1 < nz { z[j + 1] - z[j] } else { f64::INFINITY };
            lo.min(hi)
        })
        .collect();
    p1.iter()
        .zip(&p2)
        .enumerate()
        .map(|(idx, (a, b))| dt * (a.abs() / dx + b.abs() / dz[idx % nz]))
        .fold(0.0, f64::max)
}

fn guard(v: &VelocityField, transport: &VelocityField, opts: &StepOptions, level: Level, step: usize) -> Result<(), SolverError> {
    if !v.is_finite() {
        return Err(SolverError::NonFinite { level, step });
    }
    let cfl = cfl_number(transport, opts.dt);
    if !cfl.is_finite() {
        return Err(SolverError::NonFinite { level, step });
    }
    if cfl > opts.cfl_limit {
        return Err(SolverError::Cfl {
            level,
            step,
            cfl,
            limit: opts.cfl_limit,
        });
    }
    Ok(())
}

fn check_len(w: &WPath, opts: &StepOptions) -> Result<(), SolverError> {
    if w.len() != opts.n_steps + 1 {
        return Err(SolverError::Length(format!(
            "w has {} states, expected {}",
            w.len(),
            opts.n_steps + 1
        )));
    }
    Ok(())
}

/// `V_i(k) = w(k) + Σ_{j<i} v_j(k)`.
fn partial_sum(w: &WPath, levels: &[Vec<VelocityField>], i: usize, k: usize) -> VelocityField {
    let mut s = w.at(k).clone();
    for lvl in &levels[..i] {
        s.axpy(1.0, &lvl[k]);
    }
    s
}

fn march<F>(
    u0: VelocityField,
    opts: &StepOptions,
    level: Level,
    mut forcing: F,
) -> Result<Vec<VelocityField>, SolverError>
where
    F: FnMut(usize, &VelocityField) -> (VelocityField, VelocityField),
{
    let stepper = StokesStepper::new(&u0.grid, opts.dt, opts.scheme)?;
    let mut out = Vec::with_capacity(opts.n_steps + 1);
    out.push(u0);
    for k in 0..opts.n_steps {
        let (f, transport) = forcing(k, &out[k]);
        guard(&f, &transport, opts, level, k)?;
        let next = stepper.step(&out[k], Some(&f));
        if !next.is_finite() {
            return Err(SolverError::NonFinite { level, step: k + 1 });
        }
        out.push(next);
    }
    Ok(out)
}

/// Level `i` of the cascade; `lower` holds levels `0 .. i-1`.
pub fn solve_cascade_level(
    i: usize,
    w: &WPath,
    lower: &[Vec<VelocityField>],
    opts: &StepOptions,
) -> Result<Vec<VelocityField>, SolverError> {
    check_len(w, opts)?;
    if lower.len() != i {
        return Err(SolverError::DepthMismatch {
            expected: i,
            got: lower.len(),
        });
    }
    let grid = w.grid().clone();
    march(VelocityField::zeros(&grid), opts, Level::Cascade(i), |k, _| {
        if i == 0 {
            let wk = w.at(k);
            (nonlinear_term(wk, wk, opts.form), wk.clone())
        } else {
            let prev = &lower[i - 1][k];
            let v_i = partial_sum(w, lower, i, k);
            let v_im1 = partial_sum(w, lower, i - 1, k);
            let mut f = nonlinear_term(prev, &v_i, opts.form);
            f.axpy(1.0, &nonlinear_term(&v_im1, prev, opts.form));
            (f, v_i)
        }
    })
}

/// All cascade levels for the ledger's depth.
pub fn solve_cascade(w: &WPath, depth: usize, opts: &StepOptions) -> Result<Vec<Vec<VelocityField>>, SolverError> {
    let mut levels = Vec::with_capacity(depth);
    for i in 0..depth {
        let lvl = solve_cascade_level(i, w, &levels, opts)?;
        levels.push(lvl);
    }
    Ok(levels)
}

/// Remainder forcing at step `k`, with `vbar_lhs` in the first slot of the
/// quadratic term (the Picard iteration freezes it).
fn remainder_forcing(
    vbar_lhs: &VelocityField,
    vbar: &VelocityField,
    w: &WPath,
    cascade: &[Vec<VelocityField>],
    k: usize,
    form: NonlinearForm,
) -> (VelocityField, VelocityField) {
    let n = cascade.len();
    let v_tilde = partial_sum(w, cascade, n, k);
    let v_last = &cascade[n - 1][k];
    let v_nm1 = partial_sum(w, cascade, n - 1, k);
    let mut f = nonlinear_term(vbar_lhs, vbar, form);
    f.axpy(1.0, &nonlinear_term(vbar, &v_tilde, form));
    f.axpy(1.0, &nonlinear_term(&v_tilde, vbar, form));
    f.axpy(1.0, &nonlinear_term(v_last, &v_tilde, form));
    f.axpy(1.0, &nonlinear_term(&v_nm1, v_last, form));
    let transport = &v_tilde + vbar;
    (f, transport)
}

/// The nonlinear remainder `v̄` with `v̄(0) = u_in`.
pub fn solve_remainder(
    u_in: &VelocityField,
    w: &WPath,
    cascade: &[Vec<VelocityField>],
    opts: &StepOptions,
) -> Result<Vec<VelocityField>, SolverError> {
    check_len(w, opts)?;
    if cascade.is_empty() {
        return Err(SolverError::DepthMismatch { expected: 1, got: 0 });
    }
    march(u_in.clone(), opts, Level::Remainder, |k, v| {
        remainder_forcing(v, v, w, cascade, k, opts.form)
    })
}

/// Monolithic solve of `∂_t v + A v + B(v + w, v + w) = 0`.
pub fn solve_direct(u_in: &VelocityField, w: &WPath, opts: &StepOptions) -> Result<Vec<VelocityField>, SolverError> {
    check_len(w, opts)?;
    march(u_in.clone(), opts, Level::Direct, |k, v| {
        let u = v + w.at(k);
        (nonlinear_term(&u, &u, opts.form), u)
    })
}

/// Result of the slab-wise Picard iteration.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub trajectory: Vec<VelocityField>,
    /// `(start_step, slab_steps, iterations)` per accepted slab.
    pub slabs: Vec<(usize, usize, usize)>,
    /// Largest ratio of successive relative updates observed on accepted slabs.
    pub contraction_factor: f64,
}

/// Fixed-point iteration `v̄^0 = 0`, `v̄^{m+1}` solving the remainder
/// equation with the first argument of `B(v̄, v̄)` frozen at `v̄^m`.
/// Each slab iterates until the relative update drops below `tol`; growth of
/// the update over three consecutive iterations (or exhausting `max_iters`)
/// halves the slab, and a one-step slab that still fails aborts.
pub fn picard_remainder(
    u_in: &VelocityField,
    w: &WPath,
    cascade: &[Vec<VelocityField>],
    opts: &StepOptions,
    slab_steps: usize,
    max_iters: usize,
    tol: f64,
) -> Result<PicardOutcome, SolverError> {
    check_len(w, opts)?;
    if cascade.is_empty() {
        return Err(SolverError::DepthMismatch { expected: 1, got: 0 });
    }
    let grid = u_in.grid.clone();
    let stepper = StokesStepper::new(&grid, opts.dt, opts.scheme)?;
    let mut traj = vec![u_in.clone()];
    let mut slabs = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut start = 0;
    let mut len = slab_steps.max(1);
    while start < opts.n_steps {
        let steps = len.min(opts.n_steps - start);
        let mut prev: Vec<VelocityField> = vec![VelocityField::zeros(&grid); steps + 1];
        let mut updates: Vec<f64> = Vec::new();
        let mut accepted = None;
        for iter in 1..=max_iters {
            let mut cur = Vec::with_capacity(steps + 1);
            cur.push(traj[start].clone());
            for s in 0..steps {
                let k = start + s;
                let (f, transport) = remainder_forcing(&prev[s], &cur[s], w, cascade, k, opts.form);
                guard(&f, &transport, opts, Level::Remainder, k)?;
                cur.push(stepper.step(&cur[s], Some(&f)));
            }
            let diff = cur.iter().zip(&prev).map(|(a, b)| (a - b).l2_norm()).fold(0.0, f64::max);
            let size = cur.iter().map(|a| a.l2_norm()).fold(0.0, f64::max);
            let rel = if diff == 0.0 { 0.0 } else { diff / size.max(f64::MIN_POSITIVE) };
            if !rel.is_finite() {
                break;
            }
            updates.push(rel);
            prev = cur;
            if rel < tol {
                accepted = Some(iter);
                break;
            }
            let n = updates.len();
            if n >= 4 && updates[n - 1] > updates[n - 2] && updates[n - 2] > updates[n - 3] && updates[n - 3] > updates[n - 4]
            {
                break;
            }
        }
        match accepted {
            Some(iters) => {
                for pair in updates.windows(2) {
                    if pair[0] > 0.0 && pair[1] > 0.0 {
                        worst_ratio = worst_ratio.max(pair[1] / pair[0]);
                    }
                }
                traj.extend(prev.into_iter().skip(1));
                slabs.push((start, steps, iters));
                start += steps;
            }
            None if steps > 1 => {
                len = steps / 2;
            }
            None => {
                return Err(SolverError::NonContraction { start, slab_steps: steps });
            }
        }
    }
    Ok(PicardOutcome {
        trajectory: traj,
        slabs,
        contraction_factor: worst_ratio,
    })
}

/// Trajectories of a full splitting run.
#[derive(Debug, Clone)]
pub struct SplittingState {
    pub ledger: ExponentLedger,
    pub times: Vec<f64>,
    pub cascade: Vec<Vec<VelocityField>>,
    pub remainder: Vec<VelocityField>,
    pub initial: VelocityField,
}

impl SplittingState {
    /// `v = Σ v_i + v̄` at step `k`.
    pub fn v_at(&self, k: usize) -> VelocityField {
        let mut v = self.remainder[k].clone();
        for lvl in &self.cascade {
            v.axpy(1.0, &lvl[k]);
        }
        v
    }
}

/// Cascade followed by the remainder, depth taken from the ledger.
pub fn run_splitting(
    u_in: &VelocityField,
    w: &WPath,
    ledger: &ExponentLedger,
    opts: &StepOptions,
) -> Result<SplittingState, SolverError> {
    let cascade = solve_cascade(w, ledger.depth, opts)?;
    let remainder = solve_remainder(u_in, w, &cascade, opts)?;
    Ok(SplittingState {
        ledger: ledger.clone(),
        times: opts.times(),
        cascade,
        remainder,
        initial: u_in.clone(),
    })
}

/// `u = w + Σ v_i + v̄` at every step.
pub fn assemble(state: &SplittingState, w: &WPath) -> Vec<VelocityField> {
    (0..state.remainder.len()).map(|k| &state.v_at(k) + w.at(k)).collect()
}

/// Relative gap between `B(v + w, v + w)` and the sum of every forcing term
/// of the splitting system at one time, for cascade states `v_0..v_{N-1}`.
pub fn telescoping_residual(
    cascade: &[VelocityField],
    remainder: &VelocityField,
    w: &VelocityField,
    form: NonlinearForm,
) -> f64 {
    let n = cascade.len();
    // Projection is linear, so the identity is checked before it is applied.
    let b = |x: &VelocityField, y: &VelocityField| nonlinear_term(x, y, form);
    let partial = |i: usize| -> VelocityField {
        let mut s = w.clone();
        for v in &cascade[..i] {
            s.axpy(1.0, v);
        }
        s
    };
    let mut total = b(w, w);
    for i in 1..n {
        total.axpy(1.0, &b(&cascade[i - 1], &partial(i)));
        total.axpy(1.0, &b(&partial(i - 1), &cascade[i - 1]));
    }
    if n > 0 {
        let vt = partial(n);
        let last = &cascade[n - 1];
        for term in [
            b(remainder, remainder),
            b(remainder, &vt),
            b(&vt, remainder),
            b(last, &vt),
            b(&partial(n - 1), last),
        ] {
            total.axpy(1.0, &term);
        }
    } else {
        let vt = w;
        for term in [b(remainder, remainder), b(remainder, vt), b(vt, remainder)] {
            total.axpy(1.0, &term);
        }
    }
    let mut u = sum_fields(cascade.iter()).unwrap_or_else(|| VelocityField::zeros(&w.grid));
    u.axpy(1.0, remainder);
    u.axpy(1.0, w);
    let direct = b(&u, &u);
    let scale = direct.l2_norm().max(total.l2_norm());
    if scale == 0.0 {
        0.0
    } else {
        (&direct - &total).l2_norm() / scale
    }
}

/// Per step, the gap in the energy relation
/// `‖v̄(t)‖² + 2∫‖∇v̄‖² = ‖u_in‖² + 2∫ [b(v̄,v̄,Ṽ) + b(v_{N-1},v̄,Ṽ) + b(V_{N-1},v̄,v_{N-1})]`
/// with `Ṽ = w + Σ_{j≤N-1} v_j`, time integrals by the trapezoid rule.
pub fn energy_residual(
    remainder: &[VelocityField],
    cascade: &[Vec<VelocityField>],
    w: &WPath,
    dt: f64,
) -> Vec<f64> {
    let n = cascade.len();
    let integrand = |k: usize| -> (f64, f64) {
        let vb = &remainder[k];
        let vt = partial_sum(w, cascade, n, k);
        let last = &cascade[n - 1][k];
        let v_nm1 = partial_sum(w, cascade, n - 1, k);
        let diss = gradient_energy(vb);
        let work = trilinear_b(vb, vb, &vt) + trilinear_b(last, vb, &vt) + trilinear_b(&v_nm1, vb, last);
        (diss, work)
    };
    let e0 = remainder[0].l2_norm().powi(2);
    let mut out = Vec::with_capacity(remainder.len());
    let (mut diss_int, mut work_int) = (0.0, 0.0);
    let mut prev = integrand(0);
    out.push(0.0);
    for k in 1..remainder.len() {
        let cur = integrand(k);
        diss_int += 0.5 * dt * (prev.0 + cur.0);
        work_int += 0.5 * dt * (prev.1 + cur.1);
        let lhs = remainder[k].l2_norm().powi(2) + 2.0 * diss_int;
        let rhs = e0 + 2.0 * work_int;
        out.push((lhs - rhs).abs());
        prev = cur;
    }
    out
}

/// Max-over-time relative `L²` distance, symmetric in its arguments.
pub fn trajectory_distance(a: &[VelocityField], b: &[VelocityField]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.l2_norm().max(y.l2_norm());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).l2_norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Runs the splitting pipeline for two ledgers (typically different depths)
/// on the same `w` and returns the distance between the assembled fields.
pub fn compatibility_check(
    u_in: &VelocityField,
    w: &WPath,
    ledger_a: &ExponentLedger,
    ledger_b: &ExponentLedger,
    opts: &StepOptions,
) -> Result<f64, SolverError> {
    let ua = assemble(&run_splitting(u_in, w, ledger_a, opts)?, w);
    if ledger_a == ledger_b {
        return Ok(0.0);
    }
    let ub = assemble(&run_splitting(u_in, w, ledger_b, opts)?, w);
    Ok(trajectory_distance(&ua, &ub))
}

/// Steady Stokes solve `A v = f` via a single implicit step with a very large
/// step size: `v = (I + τ A)^{-1} (τ f)`, accurate to `O(1/τ)`.
pub fn stationary_stokes(f: &VelocityField, tau: f64) -> Result<VelocityField, SolverError> {
    let stepper = StokesStepper::new(&f.grid, tau, TimeScheme::ImplicitEuler)?;
    Ok(stepper.step(&VelocityField::zeros(&f.grid), Some(&f.scale(-1.0))))
}

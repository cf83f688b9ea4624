//! The boundary stochastic convolution `w_g = A ∫_0^t S(t-s) D g dW^H(s)`.
//!
//! Computed through the auxiliary process `y` solving
//! `dy = -A y dt + D g dW^H`, `y(0) = 0`, with `w_g = A y`:
//! `y_{k+1} = (I + dt A)^{-1} (y_k + D(g ΔW^H_k))`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dirichlet::{BoundaryDatum, DirichletError, DirichletLift};
use crate::fbm::CylindricalBoundaryNoise;
use crate::spectral::{
    apply_stokes, gradient_energy, lebesgue_norm, lebesgue_profile, spectral_tail, ChannelGrid, SpectralError,
    StokesStepper, TimeScheme, VelocityField,
};
use crate::stats::linear_fit;

/// Relative Chebyshev tail above which a state is flagged under-resolved.
pub const TAIL_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvolutionError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error("noise time step {noise} does not match solver time step {solver}")]
    StepMismatch { noise: f64, solver: f64 },
    #[error("Hölder fit needs gamma2 in [0, 1/2], got {0}")]
    BadGamma(f64),
    #[error("not enough states for a Hölder fit")]
    TooShort,
}

/// Streaming form of the recursion; holds only the current `y`.
pub struct ConvolutionStepper {
    stepper: StokesStepper,
    lift: DirichletLift,
    y: VelocityField,
    step: usize,
}

impl ConvolutionStepper {
    pub fn new(grid: &ChannelGrid, dt: f64, scheme: TimeScheme) -> Result<Self, ConvolutionError> {
        Ok(Self {
            stepper: StokesStepper::new(grid, dt, scheme)?,
            lift: DirichletLift::new(grid)?,
            y: VelocityField::zeros(grid),
            step: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.stepper.dt()
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn y(&self) -> &VelocityField {
        &self.y
    }

    /// `w_g = A y` at the current time.
    pub fn w(&self) -> VelocityField {
        apply_stokes(&self.y)
    }

    /// Injects `D(g ΔW)` and takes one Stokes step.
    pub fn advance(&mut self, increment: &BoundaryDatum) -> Result<(), ConvolutionError> {
        let kick = self.lift.apply(increment)?;
        let forced = &self.y + &kick;
        self.y = self.stepper.step(&forced, None);
        self.step += 1;
        Ok(())
    }
}

/// Stored trajectory of the convolution.
#[derive(Debug, Clone)]
pub struct ConvolutionTrajectory {
    pub times: Vec<f64>,
    pub y_states: Vec<VelocityField>,
    pub wg_states: Vec<VelocityField>,
    /// Largest relative Chebyshev tail of `w_g` seen over the checked states.
    pub max_tail: f64,
    pub under_resolved: bool,
}

impl ConvolutionTrajectory {
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Every `factor`-th state.
    pub fn subsample(&self, factor: usize) -> Self {
        let pick = |v: &Vec<VelocityField>| v.iter().step_by(factor).cloned().collect();
        Self {
            times: self.times.iter().step_by(factor).copied().collect(),
            y_states: pick(&self.y_states),
            wg_states: pick(&self.wg_states),
            ..self.clone()
        }
    }
}

fn check_step(noise: &CylindricalBoundaryNoise, dt: f64) -> Result<(), ConvolutionError> {
    if (noise.dt() - dt).abs() > 1e-12 * dt.max(noise.dt()) {
        return Err(ConvolutionError::StepMismatch {
            noise: noise.dt(),
            solver: dt,
        });
    }
    Ok(())
}

/// Runs the recursion over the whole noise horizon, calling
/// `visit(k, t_k, y_k, w_k)` for `k = 0..=n_steps`. Returns the largest
/// spectral tail seen (checked on about 20 evenly spaced states).
pub fn evolve_convolution_with<F>(
    noise: &CylindricalBoundaryNoise,
    grid: &ChannelGrid,
    dt: f64,
    scheme: TimeScheme,
    mut visit: F,
) -> Result<f64, ConvolutionError>
where
    F: FnMut(usize, f64, &VelocityField, &VelocityField),
{
    check_step(noise, dt)?;
    let mut cs = ConvolutionStepper::new(grid, dt, scheme)?;
    let n = noise.n_steps;
    let stride = (n / 20).max(1);
    let mut max_tail: f64 = 0.0;
    for k in 0..=n {
        let w = if k == 0 { VelocityField::zeros(grid) } else { cs.w() };
        if k > 0 && (k % stride == 0 || k == n) {
            max_tail = max_tail.max(spectral_tail(&w));
        }
        visit(k, k as f64 * dt, cs.y(), &w);
        if k < n {
            cs.advance(&BoundaryDatum::from_noise_increment(noise, k))?;
        }
    }
    if max_tail > TAIL_THRESHOLD {
        log::warn!("boundary convolution under-resolved: spectral tail {max_tail:.2e}");
    }
    Ok(max_tail)
}

/// Full stored trajectory; `wg_states[0] = 0`.
pub fn evolve_convolution(
    noise: &CylindricalBoundaryNoise,
    grid: &ChannelGrid,
    dt: f64,
    scheme: TimeScheme,
) -> Result<ConvolutionTrajectory, ConvolutionError> {
    let mut times = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let max_tail = evolve_convolution_with(noise, grid, dt, scheme, |_, t, y, w| {
        times.push(t);
        ys.push(y.clone());
        ws.push(w.clone());
    })?;
    Ok(ConvolutionTrajectory {
        times,
        y_states: ys,
        wg_states: ws,
        max_tail,
        under_resolved: max_tail > TAIL_THRESHOLD,
    })
}

/// `⟨g W^H(t), ∂_z φ_1(·, a)⟩_{L²(Γ_u)}`.
pub fn boundary_pairing(datum: &BoundaryDatum, phi: &VelocityField) -> f64 {
    let grid = &phi.grid;
    let nz = grid.n_z();
    let mut s = 0.0;
    for i in 0..grid.n_x() {
        if grid.is_nyquist(i) {
            continue;
        }
        let d = grid.cheb().diff(phi.mode1(i));
        s += (datum.mode(grid.wavenumber(i)) * d[nz - 1].conj()).re;
    }
    2.0 * std::f64::consts::PI * s
}

/// Per time step, `|⟨w(t), φ⟩ + ∫_0^t ⟨w, Aφ⟩ ds + ⟨g, ∂_z φ_1(a)⟩ W^H_t|`,
/// with the time integral by the trapezoid rule.
pub fn weak_form_residual(
    traj: &ConvolutionTrajectory,
    phi: &VelocityField,
    noise: &CylindricalBoundaryNoise,
) -> Vec<f64> {
    let a_phi = apply_stokes(phi);
    let dt = traj.dt();
    let pair: Vec<f64> = traj.wg_states.iter().map(|w| w.inner(&a_phi)).collect();
    let stride = if traj.len() > 1 {
        ((traj.dt() / noise.dt()).round() as usize).max(1)
    } else {
        1
    };
    let mut integral = 0.0;
    let mut out = Vec::with_capacity(traj.len());
    for (k, w) in traj.wg_states.iter().enumerate() {
        if k > 0 {
            integral += 0.5 * dt * (pair[k - 1] + pair[k]);
        }
        let boundary = boundary_pairing(&BoundaryDatum::from_noise(noise, k * stride), phi);
        out.push((w.inner(phi) + integral + boundary).abs());
    }
    out
}

/// `t ↦ ‖w_g(t)‖_{L^{2q}}`.
pub fn norm_trajectory(traj: &ConvolutionTrajectory, q: f64) -> Vec<f64> {
    traj.wg_states.iter().map(|w| lebesgue_norm(w, 2.0 * q)).collect()
}

/// Fitted Hölder exponent of `t ↦ field(t)` in a `D(A^{γ₂})` proxy.
///
/// The increment norm is `‖δ‖^{1-2γ₂} ‖∇δ‖^{2γ₂}` (interpolation between
/// `L²` and `H¹_0`); the exponent is the log-log slope of its RMS over time
/// against the lag, for dyadic lags up to an eighth of the record.
pub fn holder_estimate_fields(states: &[VelocityField], dt: f64, gamma2: f64) -> Result<f64, ConvolutionError> {
    if !(0.0..=0.5).contains(&gamma2) {
        return Err(ConvolutionError::BadGamma(gamma2));
    }
    let n = states.len();
    if n < 9 {
        return Err(ConvolutionError::TooShort);
    }
    let norm = |d: &VelocityField| -> f64 {
        let l2 = d.l2_norm();
        if gamma2 == 0.0 {
            l2
        } else {
            l2.powf(1.0 - 2.0 * gamma2) * gradient_energy(d).sqrt().powf(2.0 * gamma2)
        }
    };
    let mut pts = Vec::new();
    let mut lag = 1;
    while lag <= (n - 1) / 8 {
        let mut acc = 0.0;
        let mut count = 0;
        for k in 0..n - lag {
            let v = norm(&(&states[k + lag] - &states[k]));
            acc += v * v;
            count += 1;
        }
        let rms = (acc / count as f64).sqrt();
        if rms > 0.0 {
            pts.push(((lag as f64 * dt).ln(), rms.ln()));
        }
        lag *= 2;
    }
    linear_fit(&pts).map(|(slope, _)| slope).ok_or(ConvolutionError::TooShort)
}

pub fn holder_estimate(traj: &ConvolutionTrajectory, gamma2: f64) -> Result<f64, ConvolutionError> {
    holder_estimate_fields(&traj.wg_states[1..], traj.dt(), gamma2)
}

/// `z ↦` time average over `t > 0` of `‖w_g(·, z, t)‖_{L^q(𝕋)}`.
pub fn boundary_blowup_profile(traj: &ConvolutionTrajectory, q: f64) -> Vec<f64> {
    let nz = traj.wg_states[0].n_z();
    let mut acc = vec![0.0; nz];
    let states = &traj.wg_states[1..];
    for w in states {
        for (a, v) in acc.iter_mut().zip(lebesgue_profile(w, q)) {
            *a += v;
        }
    }
    let m = states.len().max(1) as f64;
    acc.iter().map(|a| a / m).collect()
}

/// Serializable per-run summary of the linear problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvolutionSummary {
    pub n_steps: usize,
    pub dt: f64,
    pub max_tail: f64,
    pub under_resolved: bool,
    pub holder_exponent: Option<f64>,
}

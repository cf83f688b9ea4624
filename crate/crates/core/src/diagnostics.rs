//! Regularity-facing measurements on fields and trajectories.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convolution::{evolve_convolution_with, holder_estimate, ConvolutionError, ConvolutionTrajectory};
use crate::fbm::{estimate_hurst, CylindricalBoundaryNoise, FbmError};
use crate::spectral::{curl, lebesgue_norm, ChannelGrid, ChebyshevBasis, GridError, ScalarField, TimeScheme, VelocityField};
use crate::stats::linear_fit;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("window [{x0}, {x1}] x [{z0}, {z1}] is not a proper rectangle inside the channel")]
    BadWindow { x0: f64, x1: f64, z0: f64, z1: f64 },
    #[error(transparent)]
    Convolution(#[from] ConvolutionError),
    #[error(transparent)]
    Fbm(#[from] FbmError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("noise has {steps} steps, not divisible into the {levels} resolution levels")]
    BadRefinement { steps: usize, levels: usize },
}

/// Rectangle `[x0, x1] × [z0, z1]` in the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub z0: f64,
    pub z1: f64,
}

impl Window {
    /// Middle half in `x`, middle 20% in `z`. Same size as
    /// [`Window::upper_wall`] so their rates are comparable.
    pub fn interior(height: f64) -> Self {
        Self {
            x0: 0.5 * std::f64::consts::PI,
            x1: 1.5 * std::f64::consts::PI,
            z0: 0.4 * height,
            z1: 0.6 * height,
        }
    }

    /// Same `x` range, top 20% in `z`, touching the upper wall.
    pub fn upper_wall(height: f64) -> Self {
        Self {
            z0: 0.8 * height,
            z1: height,
            ..Self::interior(height)
        }
    }

    /// Non-empty, at most one period wide, within `0 <= z <= height`.
    pub fn is_inside(&self, height: f64) -> bool {
        self.x1 > self.x0
            && self.x1 - self.x0 <= 2.0 * std::f64::consts::PI
            && self.z0 >= 0.0
            && self.z1 <= height
            && self.z1 > self.z0
    }

    fn validate(&self, height: f64) -> Result<(), DiagnosticsError> {
        if self.is_inside(height) {
            Ok(())
        } else {
            Err(DiagnosticsError::BadWindow {
                x0: self.x0,
                x1: self.x1,
                z0: self.z0,
                z1: self.z1,
            })
        }
    }
}

/// Local sampling resolution of the decay probe.
pub const PROBE_NX: usize = 32;
pub const PROBE_NZ: usize = 33;
/// Coefficients below this fraction of the largest are ignored in the fit.
pub const PROBE_FLOOR: f64 = 1e-12;
/// Decay rate separating analytic-looking data in calibration tests.
pub const ANALYTIC_RATE: f64 = 1.0;

/// Smooth bump on `[0, 1]`, vanishing to all orders at both ends.
fn bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (4.0 - 1.0 / (s * (1.0 - s))).exp()
    }
}

/// Decay rate of a function's local expansion on `window`: sample on a
/// Fourier (x, windowed) × Chebyshev (z) local grid, take
/// `c_l = max_m |C_{m,l}|` and return minus the slope of `ln c_l` against
/// `l` over coefficients above the floor.
pub fn interior_decay_probe_fn<F>(f: F, window: &Window) -> f64
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let cheb = ChebyshevBasis::new(PROBE_NZ, window.z1 - window.z0);
    let xs: Vec<f64> = (0..PROBE_NX)
        .map(|m| window.x0 + (window.x1 - window.x0) * m as f64 / PROBE_NX as f64)
        .collect();
    let wx: Vec<f64> = (0..PROBE_NX).map(|m| bump(m as f64 / PROBE_NX as f64)).collect();
    let mut samples = vec![[0.0; 2]; PROBE_NX * PROBE_NZ];
    for (m, &x) in xs.iter().enumerate() {
        for (l, &zl) in cheb.nodes().iter().enumerate() {
            let (a, b) = f(x, window.z0 + zl);
            samples[m * PROBE_NZ + l] = [a * wx[m], b * wx[m]];
        }
    }
    coefficient_decay(&cheb, &samples)
}

fn coefficient_decay(cheb: &ChebyshevBasis, samples: &[[f64; 2]]) -> f64 {
    let mut c = vec![0.0f64; PROBE_NZ];
    for comp in 0..2 {
        // Chebyshev in z for every x sample, then DFT in x
        let per_x: Vec<Vec<f64>> = (0..PROBE_NX)
            .map(|m| {
                let col: Vec<f64> = (0..PROBE_NZ).map(|l| samples[m * PROBE_NZ + l][comp]).collect();
                cheb.coefficients(&col)
            })
            .collect();
        for (l, cl) in c.iter_mut().enumerate() {
            for k in 0..PROBE_NX {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, row) in per_x.iter().enumerate() {
                    let ang = -2.0 * std::f64::consts::PI * (k * m) as f64 / PROBE_NX as f64;
                    acc += Complex64::from_polar(row[l], ang);
                }
                *cl = cl.max(acc.norm() / PROBE_NX as f64);
            }
        }
    }
    let peak = c.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > PROBE_FLOOR * peak)
        .map(|(l, v)| (l as f64, v.ln()))
        .collect();
    linear_fit(&pts).map_or(0.0, |(slope, _)| -slope)
}

/// Evaluates a field at an arbitrary point by Fourier summation in `x` and
/// barycentric interpolation in `z`.
pub fn evaluate(field: &VelocityField, x: f64, z: f64) -> (f64, f64) {
    let grid = &field.grid;
    let cheb = grid.cheb();
    let mut out = (0.0, 0.0);
    for i in 0..grid.n_x() {
        if grid.is_nyquist(i) {
            continue;
        }
        let e = Complex64::from_polar(1.0, grid.wavenumber(i) as f64 * x);
        let a: Complex64 = cheb.interpolate(field.mode1(i), z);
        let b: Complex64 = cheb.interpolate(field.mode2(i), z);
        out.0 += (a * e).re;
        out.1 += (b * e).re;
    }
    out
}

/// Windowed spectral decay rate of `field` on `window`; larger is smoother.
pub fn interior_decay_probe(field: &VelocityField, window: &Window) -> Result<f64, DiagnosticsError> {
    window.validate(field.grid.height())?;
    let grid = &field.grid;
    // interpolate each mode profile once to the local z nodes
    let cheb = ChebyshevBasis::new(PROBE_NZ, window.z1 - window.z0);
    let nodes: Vec<f64> = cheb.nodes().iter().map(|z| window.z0 + z).collect();
    let profiles: Vec<Option<(Vec<Complex64>, Vec<Complex64>)>> = (0..grid.n_x())
        .map(|i| {
            if grid.is_nyquist(i) {
                return None;
            }
            let p1 = nodes.iter().map(|&z| grid.cheb().interpolate(field.mode1(i), z)).collect();
            let p2 = nodes.iter().map(|&z| grid.cheb().interpolate(field.mode2(i), z)).collect();
            Some((p1, p2))
        })
        .collect();
    let xs: Vec<f64> = (0..PROBE_NX)
        .map(|m| window.x0 + (window.x1 - window.x0) * m as f64 / PROBE_NX as f64)
        .collect();
    let mut samples = vec![[0.0; 2]; PROBE_NX * PROBE_NZ];
    for (m, &x) in xs.iter().enumerate() {
        let wx = bump(m as f64 / PROBE_NX as f64);
        for (i, p) in profiles.iter().enumerate() {
            let Some((p1, p2)) = p else { continue };
            let e = Complex64::from_polar(1.0, grid.wavenumber(i) as f64 * x);
            for l in 0..PROBE_NZ {
                samples[m * PROBE_NZ + l][0] += (p1[l] * e).re * wx;
                samples[m * PROBE_NZ + l][1] += (p2[l] * e).re * wx;
            }
        }
    }
    Ok(coefficient_decay(&cheb, &samples))
}

/// `ω = ∂_x u_2 - ∂_z u_1`.
pub fn vorticity_snapshot(field: &VelocityField) -> ScalarField {
    curl(field)
}

/// Outcome of the refinement study for one `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdClass {
    Stabilizing,
    Growing,
    Indeterminate,
}

/// Relative change below which consecutive resolutions count as converged.
pub const STABLE_REL_CHANGE: f64 = 0.02;

/// Classifies a sequence of norms over successive refinements.
///
/// With relative increments `d_i = (s_{i+1} - s_i) / s_i`:
/// stabilizing when the last increment is below [`STABLE_REL_CHANGE`] in
/// magnitude or the increments contract by at least half per refinement;
/// growing when every increment is positive and the last neither falls
/// below [`STABLE_REL_CHANGE`] nor contracts by half; otherwise indeterminate.
pub fn classify_refinement(norms: &[f64]) -> ThresholdClass {
    if norms.len() < 2 || norms.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return ThresholdClass::Indeterminate;
    }
    let d: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    let last = d[d.len() - 1];
    if last.abs() <= STABLE_REL_CHANGE {
        return ThresholdClass::Stabilizing;
    }
    let contracting = d.windows(2).all(|p| p[1].abs() <= 0.5 * p[0].abs());
    if d.len() >= 2 && contracting {
        return ThresholdClass::Stabilizing;
    }
    if d.iter().all(|x| *x > 0.0) {
        return ThresholdClass::Growing;
    }
    ThresholdClass::Indeterminate
}

/// One row of the threshold table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub q: f64,
    pub n_z: usize,
    pub dt: f64,
    /// `sup_t ‖w_g(t)‖_{L^{2q}}`.
    pub sup_norm: f64,
    pub class: ThresholdClass,
}

/// Resolution level of a threshold study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub n_z: usize,
    /// Subsampling factor applied to the finest noise path.
    pub noise_stride: usize,
}

/// Refinement study of `sup_t ‖w_g‖_{L^{2q}}`. Every level is driven by the
/// same noise path, subsampled by `noise_stride`, with `dt` equal to the
/// subsampled step. A stride of 1 everywhere is a pure `z`-refinement;
/// decreasing strides couple the time step to `n_z`.
pub fn threshold_experiment(
    fine_noise: &CylindricalBoundaryNoise,
    n_x: usize,
    height: f64,
    q_list: &[f64],
    resolutions: &[Resolution],
    scheme: TimeScheme,
) -> Result<Vec<ThresholdRow>, DiagnosticsError> {
    let mut sups = vec![vec![0.0; resolutions.len()]; q_list.len()];
    let mut dts = Vec::new();
    for (r, res) in resolutions.iter().enumerate() {
        if res.noise_stride == 0 || fine_noise.n_steps % res.noise_stride != 0 {
            return Err(DiagnosticsError::BadRefinement {
                steps: fine_noise.n_steps,
                levels: resolutions.len(),
            });
        }
        let noise = fine_noise.coarsen(res.noise_stride)?;
        let grid = ChannelGrid::with_dims(n_x, res.n_z, height)?;
        let dt = noise.dt();
        dts.push(dt);
        let mut level = vec![0.0f64; q_list.len()];
        evolve_convolution_with(&noise, &grid, dt, scheme, |_, _, _, w| {
            let norms: Vec<f64> = q_list.par_iter().map(|&q| lebesgue_norm(w, 2.0 * q)).collect();
            for (s, v) in level.iter_mut().zip(norms) {
                *s = s.max(v);
            }
        })?;
        for (qi, v) in level.into_iter().enumerate() {
            sups[qi][r] = v;
        }
    }
    let mut rows = Vec::new();
    for (qi, &q) in q_list.iter().enumerate() {
        let class = classify_refinement(&sups[qi]);
        for (r, res) in resolutions.iter().enumerate() {
            rows.push(ThresholdRow {
                q,
                n_z: res.n_z,
                dt: dts[r],
                sup_norm: sups[qi][r],
                class,
            });
        }
    }
    Ok(rows)
}

/// Sampled-noise Hurst estimate next to the fitted time regularity of `w_g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstReport {
    pub hurst: f64,
    pub hurst_estimate: Option<f64>,
    pub n_paths: usize,
    pub holder_exponent: Option<f64>,
    /// `H - holder_exponent`; positive when the fit respects `γ₁ < H`.
    pub holder_margin: Option<f64>,
}

pub fn hurst_recovery_report(noise: &CylindricalBoundaryNoise, traj: &ConvolutionTrajectory) -> HurstReport {
    let max_lag = (noise.n_steps / 16).clamp(1, 16);
    let est = estimate_hurst(noise.paths.iter().map(|p| &p.path), max_lag);
    let holder = holder_estimate(traj, 0.0).ok();
    HurstReport {
        hurst: noise.hurst,
        hurst_estimate: est,
        n_paths: noise.paths.len(),
        holder_exponent: holder,
        holder_margin: holder.map(|h| noise.hurst - h),
    }
}

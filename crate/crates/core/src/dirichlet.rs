//! The Dirichlet map `D`: stationary Stokes flow driven by tangential
//! velocity data `g` on the upper wall, with the lower wall at rest.
//!
//! Per Fourier mode `k ≠ 0` the streamfunction solves `(∂_z² - k²)² ψ = 0`.
//! It is expanded in the decaying exponentials `e^{-mz}`, `z e^{-mz}`,
//! `e^{m(z-a)}`, `(z-a) e^{m(z-a)}` (`m = |k|`), which span the same space as
//! the `cosh/sinh` family but never overflow.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fbm::{CylindricalBoundaryNoise, NoiseCoefficients};
use crate::spectral::{laplacian, ChannelGrid, VelocityField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirichletError {
    #[error("boundary mode {mode} not representable on a grid with n_x = {n_x}")]
    ModeNotRepresented { mode: i64, n_x: usize },
    #[error("singular boundary system for wavenumber {0}")]
    Singular(i64),
    #[error("boundary data must have odd length 2N+1, got {0}")]
    BadLength(usize),
    #[error("boundary data violates Hermitian symmetry at mode {0}")]
    NotHermitian(i64),
}

/// Tangential velocity on the upper wall, `g(x) = Σ_{|n| <= N} g_n e^{inx}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDatum {
    pub mode_cutoff: usize,
    /// `amplitudes[n + mode_cutoff] = g_n`.
    pub amplitudes: Vec<Complex64>,
}

impl BoundaryDatum {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, DirichletError> {
        if amplitudes.len() % 2 == 0 {
            return Err(DirichletError::BadLength(amplitudes.len()));
        }
        let d = Self {
            mode_cutoff: amplitudes.len() / 2,
            amplitudes,
        };
        let nc = d.mode_cutoff as i64;
        for n in 0..=nc {
            let (a, b) = (d.mode(n), d.mode(-n));
            if (a - b.conj()).norm() > 1e-14 * (a.norm() + b.norm()) {
                return Err(DirichletError::NotHermitian(n));
            }
        }
        Ok(d)
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self {
            mode_cutoff: cutoff,
            amplitudes: vec![ZERO; 2 * cutoff + 1],
        }
    }

    /// Constant wall speed `g_0`.
    pub fn constant(g0: f64) -> Self {
        Self {
            mode_cutoff: 0,
            amplitudes: vec![Complex64::new(g0, 0.0)],
        }
    }

    /// `g_n = value`, `g_{-n} = conj(value)`, everything else zero.
    pub fn single_mode(n: i64, value: Complex64) -> Self {
        let m = n.unsigned_abs() as usize;
        let mut d = Self::zeros(m);
        if n == 0 {
            d.amplitudes[0] = Complex64::new(value.re, 0.0);
        } else {
            let v = if n > 0 { value } else { value.conj() };
            d.amplitudes[2 * m] = v;
            d.amplitudes[0] = v.conj();
        }
        d
    }

    /// The coefficient operator itself, viewed as boundary data.
    pub fn from_coefficients(c: &NoiseCoefficients) -> Self {
        Self {
            mode_cutoff: c.mode_cutoff,
            amplitudes: c.amplitudes.clone(),
        }
    }

    /// `g W^H(t_k)`.
    pub fn from_noise(noise: &CylindricalBoundaryNoise, step: usize) -> Self {
        Self::collect(noise.coefficients.mode_cutoff, |n| noise.coefficient(n, step))
    }

    /// `g (W^H(t_{k+1}) - W^H(t_k))`.
    pub fn from_noise_increment(noise: &CylindricalBoundaryNoise, step: usize) -> Self {
        Self::collect(noise.coefficients.mode_cutoff, |n| noise.coefficient_increment(n, step))
    }

    fn collect(cutoff: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let nc = cutoff as i64;
        Self {
            mode_cutoff: cutoff,
            amplitudes: (-nc..=nc).map(f).collect(),
        }
    }

    pub fn mode(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.mode_cutoff {
            return ZERO;
        }
        self.amplitudes[(n + self.mode_cutoff as i64) as usize]
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            mode_cutoff: self.mode_cutoff,
            amplitudes: self.amplitudes.iter().map(|z| z * a).collect(),
        }
    }

    /// `(Σ_n |g_n|² (1 + n²)^{-1/2})^{1/2}`, an `H^{-1/2}` proxy.
    pub fn h_minus_half_norm(&self) -> f64 {
        let nc = self.mode_cutoff as i64;
        (-nc..=nc)
            .map(|n| self.mode(n).norm_sqr() / (1.0 + (n * n) as f64).sqrt())
            .sum::<f64>()
            .sqrt()
    }
}

/// Closed-form unit-data streamfunction for wavenumber magnitude `m >= 1`:
/// `ψ(0) = ψ'(0) = ψ(a) = 0`, `ψ'(a) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftProfile {
    pub m: f64,
    pub height: f64,
    pub coeffs: [f64; 4],
}

impl LiftProfile {
    pub fn new(m: usize, height: f64) -> Result<Self, DirichletError> {
        assert!(m >= 1);
        let mf = m as f64;
        let probe = Self {
            m: mf,
            height,
            coeffs: [0.0; 4],
        };
        let mut rows = Matrix4::zeros();
        for (r, (z, order)) in [(0.0, 0), (0.0, 1), (height, 0), (height, 1)].into_iter().enumerate() {
            let b = probe.basis(z, order);
            for c in 0..4 {
                rows[(r, c)] = b[c];
            }
        }
        let sol = rows
            .lu()
            .solve(&Vector4::new(0.0, 0.0, 0.0, 1.0))
            .ok_or(DirichletError::Singular(m as i64))?;
        if !sol.iter().all(|v| v.is_finite()) {
            return Err(DirichletError::Singular(m as i64));
        }
        Ok(Self {
            coeffs: [sol[0], sol[1], sol[2], sol[3]],
            ..probe
        })
    }

    /// `order`-th derivatives of the four basis functions at `z`.
    fn basis(&self, z: f64, order: u32) -> [f64; 4] {
        // d^n/dz^n [(c + d ζ) e^{λζ}] = e^{λζ} (λ^n (c + d ζ) + n λ^{n-1} d)
        let term = |lambda: f64, zeta: f64, c: f64, d: f64| -> f64 {
            let n = order as i32;
            let lead = lambda.powi(n) * (c + d * zeta);
            let tail = if n == 0 { 0.0 } else { n as f64 * lambda.powi(n - 1) * d };
            (lambda * zeta).exp() * (lead + tail)
        };
        let (m, a) = (self.m, self.height);
        [
            term(-m, z, 1.0, 0.0),
            term(-m, z, 0.0, 1.0),
            term(m, z - a, 1.0, 0.0),
            term(m, z - a, 0.0, 1.0),
        ]
    }

    /// `ψ^{(order)}(z)`.
    pub fn derivative(&self, z: f64, order: u32) -> f64 {
        self.basis(z, order).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }

    /// Relative residual of `ψ'''' - 2m²ψ'' + m⁴ψ` at `z`.
    pub fn stokes_residual(&self, z: f64) -> f64 {
        let m2 = self.m * self.m;
        let terms = [
            self.derivative(z, 4),
            -2.0 * m2 * self.derivative(z, 2),
            m2 * m2 * self.derivative(z, 0),
        ];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let r: f64 = terms.iter().sum();
        if scale == 0.0 {
            0.0
        } else {
            r.abs() / scale
        }
    }
}

/// Per-grid cache of unit lift profiles sampled on the collocation nodes.
#[derive(Debug, Clone)]
pub struct DirichletLift {
    grid: ChannelGrid,
    /// `(ψ(z_j), ψ'(z_j))` for `|k| = 1 .. n_x/2 - 1`; index 0 unused.
    profiles: Vec<(Vec<f64>, Vec<f64>)>,
}

impl DirichletLift {
    pub fn new(grid: &ChannelGrid) -> Result<Self, DirichletError> {
        let a = grid.height();
        let mut profiles = vec![(Vec::new(), Vec::new())];
        for m in 1..grid.n_x() / 2 {
            let p = LiftProfile::new(m, a)?;
            let psi = grid.z().iter().map(|&z| p.derivative(z, 0)).collect();
            let dpsi = grid.z().iter().map(|&z| p.derivative(z, 1)).collect();
            profiles.push((psi, dpsi));
        }
        Ok(Self {
            grid: grid.clone(),
            profiles,
        })
    }

    pub fn grid(&self) -> &ChannelGrid {
        &self.grid
    }

    /// `D g` on the grid.
    pub fn apply(&self, g: &BoundaryDatum) -> Result<VelocityField, DirichletError> {
        let grid = &self.grid;
        let nz = grid.n_z();
        let a = grid.height();
        let nc = g.mode_cutoff as i64;
        if nc >= (grid.n_x() / 2) as i64 {
            if let Some(n) = (grid.n_x() as i64 / 2..=nc).find(|&n| g.mode(n) != ZERO) {
                return Err(DirichletError::ModeNotRepresented { mode: n, n_x: grid.n_x() });
            }
        }
        let mut out = VelocityField::zeros(grid);
        let g0 = g.mode(0).re;
        for (j, &z) in grid.z().iter().enumerate() {
            out.u1[j] = Complex64::new(g0 * z / a, 0.0);
        }
        for n in 1..=nc.min(grid.n_x() as i64 / 2 - 1) {
            let (psi, dpsi) = &self.profiles[n as usize];
            for k in [n, -n] {
                let gk = g.mode(k);
                if gk == ZERO {
                    continue;
                }
                let slot = grid.slot(k);
                let ik = Complex64::new(0.0, k as f64);
                for j in 0..nz {
                    out.u1[slot * nz + j] = gk * dpsi[j];
                    out.u2[slot * nz + j] = -ik * gk * psi[j];
                }
            }
        }
        Ok(out)
    }
}

/// `D g` for one-off use; build a [`DirichletLift`] to reuse profiles.
pub fn dirichlet_lift(g: &BoundaryDatum, grid: &ChannelGrid) -> Result<VelocityField, DirichletError> {
    DirichletLift::new(grid)?.apply(g)
}

/// `|∫ u·Δφ - ∫ g ∂_z φ_1(·, a)|` for a test field `φ` vanishing on both walls.
pub fn very_weak_residual(u: &VelocityField, g: &BoundaryDatum, phi: &VelocityField) -> f64 {
    let grid = &u.grid;
    let nz = grid.n_z();
    let lhs = u.inner(&laplacian(phi));
    let mut rhs = 0.0;
    for i in 0..grid.n_x() {
        if grid.is_nyquist(i) {
            continue;
        }
        let k = grid.wavenumber(i);
        let dphi = grid.cheb().diff(phi.mode1(i));
        rhs += (g.mode(k) * dphi[nz - 1].conj()).re;
    }
    rhs *= 2.0 * std::f64::consts::PI;
    (lhs - rhs).abs()
}

/// `‖D g‖_{L²} / ‖g‖_{H^{-1/2}}`.
pub fn lift_norm_ratio(g: &BoundaryDatum, grid: &ChannelGrid) -> Result<f64, DirichletError> {
    let u = dirichlet_lift(g, grid)?;
    Ok(u.l2_norm() / g.h_minus_half_norm())
}

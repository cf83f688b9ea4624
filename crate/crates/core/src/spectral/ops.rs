//! Operators on the discrete channel.
//!
//! Per Fourier mode `k` the wall-normal problems are small dense collocation
//! systems; they are independent across modes and solved in parallel.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::field::{l2_sq, ScalarField, VelocityField};
use super::grid::{lu_solve_complex, ChannelGrid, RealLu};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("singular wall-normal system for wavenumber {0}")]
    Singular(i64),
    #[error("time step must be non-negative and finite, got {0}")]
    BadStep(f64),
    #[error("Sobolev order {0} not supported (0, 1 or 2)")]
    BadOrder(u32),
}

/// Time discretization of the Stokes semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TimeScheme {
    #[default]
    #[serde(rename = "imex-euler")]
    ImplicitEuler,
    #[serde(rename = "imex-cn")]
    CrankNicolson,
}

impl TimeScheme {
    fn theta(self) -> f64 {
        match self {
            TimeScheme::ImplicitEuler => 1.0,
            TimeScheme::CrankNicolson => 0.5,
        }
    }
}

/// Discrete form of the transport term `u·∇v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearForm {
    /// `div(u ⊗ v)`.
    #[default]
    Conservative,
    /// `(u·∇) v`.
    Convective,
    /// Average of the two.
    Skew,
}

/// Evaluates `f` on the non-negative wavenumbers `0 <= k < n_x/2` and fills
/// the negative ones by conjugation, so outputs are exactly Hermitian.
fn solve_modes<F>(grid: &ChannelGrid, f: F) -> Result<Vec<Vec<Vec<Complex64>>>, SpectralError>
where
    F: Fn(usize, i64) -> Result<Vec<Vec<Complex64>>, SpectralError> + Sync,
{
    let nx = grid.n_x();
    let half: Vec<Vec<Vec<Complex64>>> = (0..nx / 2)
        .into_par_iter()
        .map(|i| f(i, i as i64))
        .collect::<Result<_, _>>()?;
    let width = half.first().map_or(0, |h| h.len());
    let nz = grid.n_z();
    let mut out = vec![vec![vec![ZERO; nz]; width]; nx];
    for (i, h) in half.into_iter().enumerate() {
        if i > 0 {
            out[nx - i] = h.iter().map(|c| c.iter().map(|z| z.conj()).collect()).collect();
        }
        out[i] = h;
    }
    Ok(out)
}

fn map_modes<F>(grid: &ChannelGrid, f: F) -> Result<VelocityField, SpectralError>
where
    F: Fn(usize, i64) -> Result<(Vec<Complex64>, Vec<Complex64>), SpectralError> + Sync,
{
    let parts = solve_modes(grid, |i, k| f(i, k).map(|(a, b)| vec![a, b]))?;
    let mut out = VelocityField::zeros(grid);
    for (i, p) in parts.iter().enumerate() {
        out.set_mode(i, &p[0], &p[1]);
    }
    Ok(out)
}

fn ik(k: i64) -> Complex64 {
    Complex64::new(0.0, k as f64)
}

/// `∂_x` and `∂_z` of one coefficient array.
fn dx(grid: &ChannelGrid, c: &[Complex64]) -> Vec<Complex64> {
    let nz = grid.n_z();
    let mut out = vec![ZERO; c.len()];
    for i in 0..grid.n_x() {
        if grid.is_nyquist(i) {
            continue;
        }
        let f = ik(grid.wavenumber(i));
        for j in 0..nz {
            out[i * nz + j] = f * c[i * nz + j];
        }
    }
    out
}

fn dz(grid: &ChannelGrid, c: &[Complex64]) -> Vec<Complex64> {
    let nz = grid.n_z();
    let mut out = Vec::with_capacity(c.len());
    for chunk in c.chunks_exact(nz) {
        out.extend(grid.cheb().diff(chunk));
    }
    out
}

/// Helmholtz–Leray decomposition `f = P f + ∇ψ_f`.
///
/// Per mode `k ≠ 0`, `ψ` solves `(D² - k²) ψ = ik f_1 + D f_2` at interior
/// nodes with `Dψ = f_2` at both walls. At `k = 0` incompressibility and
/// no-penetration force the normal component to vanish, so `P` keeps `f_1`
/// and zeroes `f_2`; the potential is normalized to zero there.
pub fn helmholtz_split(f: &VelocityField) -> (VelocityField, ScalarField) {
    let grid = &f.grid;
    let nz = grid.n_z();
    let cheb = grid.cheb();
    let mut potential = ScalarField::zeros(grid);
    let parts = solve_modes(grid, |i, k| {
        let (f1, f2) = (f.mode1(i), f.mode2(i));
        if k == 0 {
            return Ok(vec![f1.to_vec(), vec![ZERO; nz], vec![ZERO; nz]]);
        }
        let df2 = cheb.diff(f2);
        let mut rhs: Vec<Complex64> = f1.iter().zip(&df2).map(|(a, b)| ik(k) * a + b).collect();
        rhs[0] = f2[0];
        rhs[nz - 1] = f2[nz - 1];
        let psi = lu_solve_complex(grid.projector_lu(k.unsigned_abs() as usize), &rhs)
            .ok_or(SpectralError::Singular(k))?;
        let dpsi = cheb.diff(&psi);
        let g1 = f1.iter().zip(&psi).map(|(a, p)| a - ik(k) * p).collect();
        let g2 = f2.iter().zip(&dpsi).map(|(a, p)| a - p).collect();
        Ok(vec![g1, g2, psi])
    })
    .expect("Neumann problem is regular for k != 0");
    let mut out = VelocityField::zeros(grid);
    for (i, p) in parts.iter().enumerate() {
        out.set_mode(i, &p[0], &p[1]);
        potential.coeffs[i * nz..(i + 1) * nz].copy_from_slice(&p[2]);
    }
    (out, potential)
}

/// Leray projection onto divergence-free fields with zero normal trace.
pub fn leray_project(f: &VelocityField) -> VelocityField {
    helmholtz_split(f).0
}

/// Velocity of a streamfunction: `u = (∂_z ψ, -∂_x ψ)`.
pub fn from_streamfunction(psi: &ScalarField) -> VelocityField {
    VelocityField {
        grid: psi.grid.clone(),
        u1: dz(&psi.grid, &psi.coeffs),
        u2: dx(&psi.grid, &psi.coeffs).into_iter().map(|z| -z).collect(),
    }
}

pub fn divergence(v: &VelocityField) -> ScalarField {
    let a = dx(&v.grid, &v.u1);
    let b = dz(&v.grid, &v.u2);
    ScalarField {
        grid: v.grid.clone(),
        coeffs: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
    }
}

/// `ω = ∂_x u_2 - ∂_z u_1`.
pub fn curl(v: &VelocityField) -> ScalarField {
    let a = dx(&v.grid, &v.u2);
    let b = dz(&v.grid, &v.u1);
    ScalarField {
        grid: v.grid.clone(),
        coeffs: a.iter().zip(&b).map(|(x, y)| x - y).collect(),
    }
}

/// Componentwise `Δv`.
pub fn laplacian(v: &VelocityField) -> VelocityField {
    let grid = &v.grid;
    let nz = grid.n_z();
    let lap = |c: &[Complex64]| {
        let mut out = Vec::with_capacity(c.len());
        for (i, chunk) in c.chunks_exact(nz).enumerate() {
            let k2 = if grid.is_nyquist(i) { 0.0 } else { (grid.wavenumber(i).pow(2)) as f64 };
            let d2 = grid.cheb().diff2(chunk);
            out.extend(d2.iter().zip(chunk).map(|(a, b)| a - b * k2));
        }
        out
    };
    VelocityField {
        grid: grid.clone(),
        u1: lap(&v.u1),
        u2: lap(&v.u2),
    }
}

/// Stokes operator `A v = -P Δ v`.
pub fn apply_stokes(v: &VelocityField) -> VelocityField {
    leray_project(&laplacian(v).scale(-1.0))
}

/// Cached per-mode factorizations for one `(dt, scheme)` pair.
///
/// For `k ≠ 0` the step solves `(Δ_k - θ dt Δ_k²) ψ⁺ = rhs` with clamped
/// walls `ψ = ψ' = 0`, factored as `Δ_k φ = rhs`, `(1 - θ dt Δ_k) ψ⁺ = φ`
/// (Dirichlet on `ψ⁺`); the two unknown wall values of `φ` are fixed by an
/// influence matrix so that `ψ⁺' = 0` at both walls. Only second-order
/// collocation systems are factorized.
pub struct StokesStepper {
    grid: ChannelGrid,
    dt: f64,
    scheme: TimeScheme,
    modes: Vec<ModeSolver>,
}

enum ModeSolver {
    Mean {
        helm: RealLu,
    },
    Wave {
        lap: RealLu,
        helm: RealLu,
        psi_a: Vec<f64>,
        psi_b: Vec<f64>,
        influence_inv: [[f64; 2]; 2],
    },
}

fn dirichlet_matrix(grid: &ChannelGrid, k2: f64, alpha: f64, beta: f64) -> DMatrix<f64> {
    // alpha I + beta (D² - k²) with identity wall rows
    let n = grid.n_z();
    let d2 = grid.cheb().d2();
    let mut m = DMatrix::zeros(n, n);
    for i in 1..n - 1 {
        for j in 0..n {
            m[(i, j)] = beta * d2[i * n + j];
        }
        m[(i, i)] += alpha - beta * k2;
    }
    m[(0, 0)] = 1.0;
    m[(n - 1, n - 1)] = 1.0;
    m
}

fn real_solve(lu: &RealLu, rhs: Vec<f64>) -> Option<Vec<f64>> {
    lu.solve(&nalgebra::DVector::from_vec(rhs)).map(|v| v.iter().copied().collect())
}

impl StokesStepper {
    pub fn new(grid: &ChannelGrid, dt: f64, scheme: TimeScheme) -> Result<Self, SpectralError> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(SpectralError::BadStep(dt));
        }
        let tdt = scheme.theta() * dt;
        let n = grid.n_z();
        let d1 = grid.cheb().d1();
        let modes = (0..grid.n_x() / 2)
            .into_par_iter()
            .map(|k| {
                let k2 = (k * k) as f64;
                let helm = dirichlet_matrix(grid, k2, 1.0, -tdt).lu();
                if k == 0 {
                    if !helm.is_invertible() {
                        return Err(SpectralError::Singular(0));
                    }
                    return Ok(ModeSolver::Mean { helm });
                }
                let lap = dirichlet_matrix(grid, k2, 0.0, 1.0).lu();
                if !helm.is_invertible() || !lap.is_invertible() {
                    return Err(SpectralError::Singular(k as i64));
                }
                let homogeneous = |wall: usize| -> Option<Vec<f64>> {
                    let mut e = vec![0.0; n];
                    e[wall] = 1.0;
                    let mut phi = real_solve(&lap, e)?;
                    phi[0] = 0.0;
                    phi[n - 1] = 0.0;
                    real_solve(&helm, phi)
                };
                let psi_a = homogeneous(0).ok_or(SpectralError::Singular(k as i64))?;
                let psi_b = homogeneous(n - 1).ok_or(SpectralError::Singular(k as i64))?;
                let slope = |p: &[f64], row: usize| -> f64 {
                    d1[row * n..(row + 1) * n].iter().zip(p).map(|(a, b)| a * b).sum()
                };
                let g = [
                    [slope(&psi_a, 0), slope(&psi_b, 0)],
                    [slope(&psi_a, n - 1), slope(&psi_b, n - 1)],
                ];
                let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
                let scale = g.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
                if det.abs() <= 1e-14 * scale * scale {
                    return Err(SpectralError::Singular(k as i64));
                }
                let influence_inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
                Ok(ModeSolver::Wave {
                    lap,
                    helm,
                    psi_a,
                    psi_b,
                    influence_inv,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            grid: grid.clone(),
            dt,
            scheme,
            modes,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> TimeScheme {
        self.scheme
    }

    pub fn grid(&self) -> &ChannelGrid {
        &self.grid
    }

    /// One step of `∂_t v + A v + F = 0` with `F` explicit:
    /// `(I + θ dt A) v⁺ = (I - (1-θ) dt A) v - dt F`.
    ///
    /// `v` may carry nonzero tangential wall values (e.g. an injected
    /// boundary lift); the output satisfies no-slip. Gradient parts of `F`
    /// have no effect.
    pub fn step(&self, v: &VelocityField, forcing: Option<&VelocityField>) -> VelocityField {
        if self.dt == 0.0 && forcing.is_none() {
            return v.clone();
        }
        let grid = &self.grid;
        let n = grid.n_z();
        let cheb = grid.cheb();
        let dt = self.dt;
        let explicit = (1.0 - self.scheme.theta()) * dt;
        map_modes(grid, |i, k| {
            let solver = &self.modes[k.unsigned_abs() as usize];
            let (v1, v2) = (v.mode1(i), v.mode2(i));
            match solver {
                ModeSolver::Mean { helm } => {
                    let mut rhs = v1.to_vec();
                    if explicit != 0.0 {
                        for (r, d) in rhs.iter_mut().zip(cheb.diff2(v1)) {
                            *r += d * explicit;
                        }
                    }
                    if let Some(f) = forcing {
                        for (r, g) in rhs.iter_mut().zip(f.mode1(i)) {
                            *r -= g * dt;
                        }
                    }
                    rhs[0] = ZERO;
                    rhs[n - 1] = ZERO;
                    let u1 = lu_solve_complex(helm, &rhs).ok_or(SpectralError::Singular(0))?;
                    Ok((u1, vec![ZERO; n]))
                }
                ModeSolver::Wave {
                    lap,
                    helm,
                    psi_a,
                    psi_b,
                    influence_inv,
                } => {
                    // -curl v = Δψ_v for v = (Dψ, -ikψ)
                    let w_of = |c1: &[Complex64], c2: &[Complex64]| -> Vec<Complex64> {
                        cheb.diff(c1).iter().zip(c2).map(|(a, b)| a - ik(k) * b).collect()
                    };
                    let mut rhs = w_of(v1, v2);
                    if explicit != 0.0 {
                        let k2 = (k * k) as f64;
                        let lap_w = cheb.diff2(&rhs);
                        let w = rhs.clone();
                        for ((r, l), w) in rhs.iter_mut().zip(&lap_w).zip(&w) {
                            *r += (l - w * k2) * explicit;
                        }
                    }
                    if let Some(f) = forcing {
                        let wf = w_of(f.mode1(i), f.mode2(i));
                        for (r, g) in rhs.iter_mut().zip(&wf) {
                            *r -= g * dt;
                        }
                    }
                    rhs[0] = ZERO;
                    rhs[n - 1] = ZERO;
                    let mut phi = lu_solve_complex(lap, &rhs).ok_or(SpectralError::Singular(k))?;
                    phi[0] = ZERO;
                    phi[n - 1] = ZERO;
                    let mut psi = lu_solve_complex(helm, &phi).ok_or(SpectralError::Singular(k))?;
                    let d1 = cheb.d1();
                    let slope = |row: usize| -> Complex64 {
                        d1[row * n..(row + 1) * n]
                            .iter()
                            .zip(&psi)
                            .fold(ZERO, |acc, (a, p)| acc + p * *a)
                    };
                    let (s0, s1) = (slope(0), slope(n - 1));
                    let alpha = -(s0 * influence_inv[0][0] + s1 * influence_inv[0][1]);
                    let beta = -(s0 * influence_inv[1][0] + s1 * influence_inv[1][1]);
                    for ((p, a), b) in psi.iter_mut().zip(psi_a).zip(psi_b) {
                        *p += alpha * *a + beta * *b;
                    }
                    let u1 = cheb.diff(&psi);
                    let u2 = psi.iter().map(|p| -ik(k) * p).collect();
                    Ok((u1, u2))
                }
            }
        })
        .expect("factorizations checked at construction")
    }
}

/// One implicit-Euler step of `∂_t v = -A v`.
pub fn stokes_step(v: &VelocityField, dt: f64) -> Result<VelocityField, SpectralError> {
    Ok(StokesStepper::new(&v.grid, dt, TimeScheme::ImplicitEuler)?.step(v, None))
}

/// `N(u, v)` in the requested form, dealiased by the 2/3 rule, not projected.
pub fn nonlinear_term(u: &VelocityField, v: &VelocityField, form: NonlinearForm) -> VelocityField {
    let grid = &u.grid;
    let (p_u1, p_u2) = u.to_physical();
    let mut out = match form {
        NonlinearForm::Conservative => conservative(grid, &p_u1, &p_u2, v),
        NonlinearForm::Convective => convective(grid, &p_u1, &p_u2, v),
        NonlinearForm::Skew => {
            let mut a = conservative(grid, &p_u1, &p_u2, v);
            let b = convective(grid, &p_u1, &p_u2, v);
            a.axpy(1.0, &b);
            a.scale(0.5)
        }
    };
    out.truncate(grid.dealias_cutoff());
    out
}

fn conservative(grid: &ChannelGrid, u1: &[f64], u2: &[f64], v: &VelocityField) -> VelocityField {
    let (v1, v2) = v.to_physical();
    let prod = |a: &[f64], b: &[f64]| -> Vec<Complex64> {
        grid.analyze(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>())
    };
    let comp = |vj: &[f64]| -> Vec<Complex64> {
        let fx = dx(grid, &prod(u1, vj));
        let fz = dz(grid, &prod(u2, vj));
        fx.iter().zip(&fz).map(|(a, b)| a + b).collect()
    };
    VelocityField {
        grid: grid.clone(),
        u1: comp(&v1),
        u2: comp(&v2),
    }
}

fn convective(grid: &ChannelGrid, u1: &[f64], u2: &[f64], v: &VelocityField) -> VelocityField {
    let comp = |c: &[Complex64]| -> Vec<Complex64> {
        let gx = grid.synthesize(&dx(grid, c));
        let gz = grid.synthesize(&dz(grid, c));
        let vals: Vec<f64> = (0..gx.len()).map(|idx| u1[idx] * gx[idx] + u2[idx] * gz[idx]).collect();
        grid.analyze(&vals)
    };
    VelocityField {
        grid: grid.clone(),
        u1: comp(&v.u1),
        u2: comp(&v.u2),
    }
}

/// `B(u, v) = P div(u ⊗ v)`.
pub fn bilinear_b(u: &VelocityField, v: &VelocityField) -> VelocityField {
    leray_project(&nonlinear_term(u, v, NonlinearForm::Conservative))
}

/// `B` with a chosen discrete transport form.
pub fn bilinear_b_form(u: &VelocityField, v: &VelocityField, form: NonlinearForm) -> VelocityField {
    leray_project(&nonlinear_term(u, v, form))
}

/// Physical-space quadrature on the 3/2-padded grid.
fn padded_quadrature(grid: &ChannelGrid, values: &[f64]) -> f64 {
    let nz = grid.n_z();
    let w = grid.cheb().weights();
    let s: f64 = values.iter().enumerate().map(|(idx, v)| w[idx % nz] * v).sum();
    TWO_PI * s / grid.padded_len() as f64
}

/// `b(u, v, w) = Σ_{i,j} ∫ u_i ∂_i v_j w_j`.
pub fn trilinear_b(u: &VelocityField, v: &VelocityField, w: &VelocityField) -> f64 {
    let grid = &u.grid;
    let p = |c: &[Complex64]| grid.synthesize_padded(c);
    let (u1, u2) = (p(&u.u1), p(&u.u2));
    let mut total = vec![0.0; u1.len()];
    for (vj, wj) in [(&v.u1, &w.u1), (&v.u2, &w.u2)] {
        let gx = p(&dx(grid, vj));
        let gz = p(&dz(grid, vj));
        let wp = p(wj);
        for idx in 0..total.len() {
            total[idx] += (u1[idx] * gx[idx] + u2[idx] * gz[idx]) * wp[idx];
        }
    }
    padded_quadrature(grid, &total)
}

/// `‖∇v‖²_{L²} = Σ_j ‖∂_x v_j‖² + ‖∂_z v_j‖²`.
pub fn gradient_energy(v: &VelocityField) -> f64 {
    let g = &v.grid;
    [&v.u1, &v.u2]
        .iter()
        .map(|c| l2_sq(g, &dx(g, c)) + l2_sq(g, &dz(g, c)))
        .sum()
}

/// `‖v‖_{L^q}` by quadrature of `|v|^q` on the collocation grid.
pub fn lebesgue_norm(v: &VelocityField, q: f64) -> f64 {
    let grid = &v.grid;
    let (p1, p2) = v.to_physical();
    let nz = grid.n_z();
    let w = grid.cheb().weights();
    let s: f64 = p1
        .iter()
        .zip(&p2)
        .enumerate()
        .map(|(idx, (a, b))| w[idx % nz] * (a * a + b * b).sqrt().powf(q))
        .sum();
    (TWO_PI * s / grid.n_x() as f64).powf(1.0 / q)
}

/// `z ↦ (∫ |v(x, z)|^q dx)^{1/q}`.
pub fn lebesgue_profile(v: &VelocityField, q: f64) -> Vec<f64> {
    let grid = &v.grid;
    let (p1, p2) = v.to_physical();
    let nz = grid.n_z();
    let nx = grid.n_x();
    (0..nz)
        .map(|j| {
            let s: f64 = (0..nx)
                .map(|m| {
                    let (a, b) = (p1[m * nz + j], p2[m * nz + j]);
                    (a * a + b * b).sqrt().powf(q)
                })
                .sum();
            (TWO_PI * s / nx as f64).powf(1.0 / q)
        })
        .collect()
}

/// Integer-order `H^m` norm (`m ≤ 2`) from spectral derivatives.
pub fn sobolev_norm(v: &VelocityField, order: u32) -> Result<f64, SpectralError> {
    if order > 2 {
        return Err(SpectralError::BadOrder(order));
    }
    let g = &v.grid;
    let mut total = 0.0;
    for c in [&v.u1, &v.u2] {
        // all ∂_x^a ∂_z^b with a + b <= order
        let mut layer = vec![c.clone()];
        total += l2_sq(g, c);
        for _ in 0..order {
            let mut next = Vec::new();
            for (idx, f) in layer.iter().enumerate() {
                if idx == 0 {
                    next.push(dx(g, f));
                }
                next.push(dz(g, f));
            }
            total += next.iter().map(|f| l2_sq(g, f)).sum::<f64>();
            layer = next;
        }
    }
    Ok(total.sqrt())
}

/// Relative size of the highest Chebyshev coefficients and the highest
/// retained Fourier modes; large values signal an under-resolved field.
pub fn spectral_tail(v: &VelocityField) -> f64 {
    let grid = &v.grid;
    let nz = grid.n_z();
    let cheb = grid.cheb();
    let tail_from = nz - (nz / 8).max(2);
    let (mut tail, mut peak) = (0.0f64, 0.0f64);
    for c in [&v.u1, &v.u2] {
        for chunk in c.chunks_exact(nz) {
            let re: Vec<f64> = chunk.iter().map(|z| z.re).collect();
            let im: Vec<f64> = chunk.iter().map(|z| z.im).collect();
            for coeffs in [cheb.coefficients(&re), cheb.coefficients(&im)] {
                for (l, a) in coeffs.iter().enumerate() {
                    peak = peak.max(a.abs());
                    if l >= tail_from {
                        tail = tail.max(a.abs());
                    }
                }
            }
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

/// Scalar streamfunction from nodal mode profiles `ψ_k(z)`, `k ≥ 1`; the
/// negative modes are filled by conjugation.
pub fn streamfunction_from_modes(grid: &ChannelGrid, profiles: &[(i64, Vec<Complex64>)]) -> ScalarField {
    let nz = grid.n_z();
    let mut s = ScalarField::zeros(grid);
    for (k, prof) in profiles {
        assert!(*k > 0);
        let (i, m) = (grid.slot(*k), grid.slot(-*k));
        for j in 0..nz {
            s.coeffs[i * nz + j] = prof[j];
            s.coeffs[m * nz + j] = prof[j].conj();
        }
    }
    s
}

//! Smooth random fields for tests, examples and default initial data.

use num_complex::Complex64;
use rand::Rng;

use crate::spectral::{from_streamfunction, streamfunction_from_modes, ChannelGrid, ScalarField, VelocityField};

/// Shape of a random solenoidal field built from a streamfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRecipe {
    /// Highest Fourier mode.
    pub max_mode: i64,
    /// Degree of the random polynomial factor in `z`.
    pub degree: usize,
    /// Clamp `ψ` so that both velocity components vanish at the walls;
    /// otherwise only the normal component does.
    pub no_slip: bool,
}

impl Default for FieldRecipe {
    fn default() -> Self {
        Self {
            max_mode: 5,
            degree: 6,
            no_slip: false,
        }
    }
}

impl FieldRecipe {
    pub fn no_slip() -> Self {
        Self {
            no_slip: true,
            ..Self::default()
        }
    }
}

fn random_poly<R: Rng>(rng: &mut R, degree: usize) -> Vec<f64> {
    (0..=degree).map(|d| rng.gen_range(-1.0..1.0) / (1.0 + d as f64)).collect()
}

fn eval_poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * s + a)
}

fn capped_mode(grid: &ChannelGrid, max_mode: i64) -> i64 {
    max_mode.min(grid.dealias_cutoff()).max(0)
}

/// Random divergence-free field with zero normal trace (and zero tangential
/// trace when `recipe.no_slip`).
pub fn random_solenoidal<R: Rng>(grid: &ChannelGrid, rng: &mut R, recipe: FieldRecipe) -> VelocityField {
    let a = grid.height();
    let z = grid.z().to_vec();
    let wall = |s: f64| if recipe.no_slip { (s * (1.0 - s)).powi(2) } else { s * (1.0 - s) };
    let mut profiles = Vec::new();
    for k in 1..=capped_mode(grid, recipe.max_mode) {
        let (pr, pi) = (random_poly(rng, recipe.degree), random_poly(rng, recipe.degree));
        let amp = 1.0 / (k * k) as f64;
        let prof = z
            .iter()
            .map(|&zj| {
                let s = zj / a;
                Complex64::new(eval_poly(&pr, s), eval_poly(&pi, s)) * (wall(s) * amp)
            })
            .collect();
        profiles.push((k, prof));
    }
    let mut v = from_streamfunction(&streamfunction_from_modes(grid, &profiles));
    // mean shear flow
    let p0 = random_poly(rng, recipe.degree);
    let nz = grid.n_z();
    for (j, &zj) in z.iter().enumerate() {
        let s = zj / a;
        let f = if recipe.no_slip { s * (1.0 - s) } else { 1.0 };
        v.u1[j] = Complex64::new(f * eval_poly(&p0, s), 0.0);
    }
    debug_assert_eq!(v.u1.len(), grid.n_x() * nz);
    v
}

/// Arbitrary smooth (not solenoidal) field.
pub fn random_smooth_field<R: Rng>(grid: &ChannelGrid, rng: &mut R, max_mode: i64, degree: usize) -> VelocityField {
    let s1 = random_scalar(grid, rng, max_mode, degree);
    let s2 = random_scalar(grid, rng, max_mode, degree);
    VelocityField {
        grid: grid.clone(),
        u1: s1.coeffs,
        u2: s2.coeffs,
    }
}

/// Random smooth real scalar `Σ_k p_k(z) e^{ikx}`.
pub fn random_scalar<R: Rng>(grid: &ChannelGrid, rng: &mut R, max_mode: i64, degree: usize) -> ScalarField {
    let a = grid.height();
    let kmax = capped_mode(grid, max_mode);
    let terms: Vec<(i64, Vec<f64>, Vec<f64>)> = (0..=kmax)
        .map(|k| (k, random_poly(rng, degree), random_poly(rng, degree)))
        .collect();
    ScalarField::from_fn(grid, |x, z| {
        let s = z / a;
        terms
            .iter()
            .map(|(k, c, d)| {
                let amp = 1.0 / (1 + k * k) as f64;
                amp * (eval_poly(c, s) * (*k as f64 * x).cos() + eval_poly(d, s) * (*k as f64 * x).sin())
            })
            .sum()
    })
}

/// `∇φ` for a random smooth potential `φ`.
pub fn gradient_field<R: Rng>(grid: &ChannelGrid, rng: &mut R, max_mode: i64, degree: usize) -> VelocityField {
    let phi = random_scalar(grid, rng, max_mode, degree);
    let nz = grid.n_z();
    let mut g = VelocityField::zeros(grid);
    for i in 0..grid.n_x() {
        if grid.is_nyquist(i) {
            continue;
        }
        let k = grid.wavenumber(i) as f64;
        let m = phi.mode(i);
        let dz = grid.cheb().diff(m);
        let c1: Vec<Complex64> = m.iter().map(|c| Complex64::new(0.0, k) * c).collect();
        g.set_mode(i, &c1, &dz);
    }
    debug_assert_eq!(g.u1.len(), grid.n_x() * nz);
    g
}

/// Deterministic smooth no-slip initial velocity with unit-order energy:
/// streamfunction `ψ = s²(1-s)² (cos x + ½ sin 2x)` plus a parabolic mean flow.
pub fn default_initial_velocity(grid: &ChannelGrid) -> VelocityField {
    let a = grid.height();
    let psi = ScalarField::from_fn(grid, |x, z| {
        let s = z / a;
        4.0 * a * (s * (1.0 - s)).powi(2) * (x.cos() + 0.5 * (2.0 * x).sin())
    });
    let mut v = from_streamfunction(&psi);
    for (j, &zj) in grid.z().iter().enumerate() {
        let s = zj / a;
        v.u1[j] += Complex64::new(s * (1.0 - s), 0.0);
    }
    v
}

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::grid::ChannelGrid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Two-component velocity in mixed representation: Fourier modes in `x`
/// (FFT ordering) times nodal values in `z`, stored `[mode * n_z + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub grid: ChannelGrid,
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
}

/// Scalar companion of [`VelocityField`] (potentials, streamfunctions, vorticity).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: ChannelGrid,
    pub coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: &ChannelGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.n_x() * grid.n_z()],
        }
    }

    pub fn from_fn(grid: &ChannelGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: grid.analyze(&sample(grid, f)),
        }
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.grid.synthesize(&self.coeffs)
    }

    pub fn mode(&self, slot: usize) -> &[Complex64] {
        let nz = self.grid.n_z();
        &self.coeffs[slot * nz..(slot + 1) * nz]
    }

    /// `‖f‖_{L²}` by Parseval and Clenshaw–Curtis quadrature.
    pub fn l2_norm(&self) -> f64 {
        l2_sq(&self.grid, &self.coeffs).sqrt()
    }
}

pub(crate) fn sample(grid: &ChannelGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let x = grid.x();
    let z = grid.z();
    let nz = grid.n_z();
    let mut out = vec![0.0; grid.n_x() * nz];
    for (m, &xm) in x.iter().enumerate() {
        for (j, &zj) in z.iter().enumerate() {
            out[m * nz + j] = f(xm, zj);
        }
    }
    out
}

/// `∫ |f|²` for one coefficient array.
pub(crate) fn l2_sq(grid: &ChannelGrid, c: &[Complex64]) -> f64 {
    let w = grid.cheb().weights();
    let nz = grid.n_z();
    let mut s = 0.0;
    for (idx, v) in c.iter().enumerate() {
        s += w[idx % nz] * v.norm_sqr();
    }
    2.0 * std::f64::consts::PI * s
}

pub(crate) fn inner(grid: &ChannelGrid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let w = grid.cheb().weights();
    let nz = grid.n_z();
    let mut s = 0.0;
    for (idx, (x, y)) in a.iter().zip(b).enumerate() {
        s += w[idx % nz] * (x * y.conj()).re;
    }
    2.0 * std::f64::consts::PI * s
}

impl VelocityField {
    pub fn zeros(grid: &ChannelGrid) -> Self {
        let n = grid.n_x() * grid.n_z();
        Self {
            grid: grid.clone(),
            u1: vec![ZERO; n],
            u2: vec![ZERO; n],
        }
    }

    /// Samples physical components on the grid and transforms to modes.
    pub fn from_fn(
        grid: &ChannelGrid,
        f1: impl Fn(f64, f64) -> f64,
        f2: impl Fn(f64, f64) -> f64,
    ) -> Self {
        Self {
            grid: grid.clone(),
            u1: grid.analyze(&sample(grid, f1)),
            u2: grid.analyze(&sample(grid, f2)),
        }
    }

    pub fn n_z(&self) -> usize {
        self.grid.n_z()
    }

    pub fn mode1(&self, slot: usize) -> &[Complex64] {
        let nz = self.n_z();
        &self.u1[slot * nz..(slot + 1) * nz]
    }

    pub fn mode2(&self, slot: usize) -> &[Complex64] {
        let nz = self.n_z();
        &self.u2[slot * nz..(slot + 1) * nz]
    }

    pub fn set_mode(&mut self, slot: usize, c1: &[Complex64], c2: &[Complex64]) {
        let nz = self.n_z();
        self.u1[slot * nz..(slot + 1) * nz].copy_from_slice(c1);
        self.u2[slot * nz..(slot + 1) * nz].copy_from_slice(c2);
    }

    /// Physical components `([m * n_z + j], [m * n_z + j])`.
    pub fn to_physical(&self) -> (Vec<f64>, Vec<f64>) {
        (self.grid.synthesize(&self.u1), self.grid.synthesize(&self.u2))
    }

    /// `⟨u, v⟩_{L²(O)}`.
    pub fn inner(&self, other: &Self) -> f64 {
        inner(&self.grid, &self.u1, &other.u1) + inner(&self.grid, &self.u2, &other.u2)
    }

    pub fn l2_norm(&self) -> f64 {
        (l2_sq(&self.grid, &self.u1) + l2_sq(&self.grid, &self.u2)).sqrt()
    }

    /// Largest coefficient magnitude (used for relative tolerances).
    pub fn max_abs(&self) -> f64 {
        self.u1.iter().chain(&self.u2).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.iter().chain(&self.u2).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            u1: self.u1.iter().map(|z| z * a).collect(),
            u2: self.u2.iter().map(|z| z * a).collect(),
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.u1.iter_mut().zip(&other.u1) {
            *x += y * a;
        }
        for (x, y) in self.u2.iter_mut().zip(&other.u2) {
            *x += y * a;
        }
    }

    /// Largest deviation from `u(-k) = conj(u(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let nz = self.n_z();
        let mut d: f64 = 0.0;
        for i in 1..self.grid.n_x() {
            let k = self.grid.wavenumber(i);
            if self.grid.is_nyquist(i) {
                continue;
            }
            let mirror = self.grid.slot(-k);
            for j in 0..nz {
                d = d.max((self.u1[i * nz + j] - self.u1[mirror * nz + j].conj()).norm());
                d = d.max((self.u2[i * nz + j] - self.u2[mirror * nz + j].conj()).norm());
            }
        }
        for j in 0..nz {
            d = d.max(self.u1[j].im.abs()).max(self.u2[j].im.abs());
        }
        d
    }

    /// Zeroes every mode with `|k| > cutoff` (and the Nyquist slot).
    pub fn truncate(&mut self, cutoff: i64) {
        let nz = self.n_z();
        for i in 0..self.grid.n_x() {
            if self.grid.is_nyquist(i) || self.grid.wavenumber(i).abs() > cutoff {
                for j in 0..nz {
                    self.u1[i * nz + j] = ZERO;
                    self.u2[i * nz + j] = ZERO;
                }
            }
        }
    }

    /// Largest `|u|` over the wall rows `j = 0` and `j = n_z - 1` in spectral space.
    pub fn wall_values(&self) -> f64 {
        let nz = self.n_z();
        let mut m: f64 = 0.0;
        for i in 0..self.grid.n_x() {
            for &j in &[0, nz - 1] {
                m = m.max(self.u1[i * nz + j].norm()).max(self.u2[i * nz + j].norm());
            }
        }
        m
    }
}

impl Add for &VelocityField {
    type Output = VelocityField;
    fn add(self, rhs: Self) -> VelocityField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &VelocityField {
    type Output = VelocityField;
    fn sub(self, rhs: Self) -> VelocityField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &VelocityField {
    type Output = VelocityField;
    fn mul(self, a: f64) -> VelocityField {
        self.scale(a)
    }
}

impl Neg for &VelocityField {
    type Output = VelocityField;
    fn neg(self) -> VelocityField {
        self.scale(-1.0)
    }
}

/// Sum of fields on a common grid; `None` for an empty iterator.
pub fn sum_fields<'a>(fields: impl IntoIterator<Item = &'a VelocityField>) -> Option<VelocityField> {
    let mut it = fields.into_iter();
    let mut acc = it.next()?.clone();
    for f in it {
        acc.axpy(1.0, f);
    }
    Some(acc)
}

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, LU, Dyn};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::chebyshev::ChebyshevBasis;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("n_x must be even and at least 4, got {0}")]
    BadNx(usize),
    #[error("n_z must be at least 9, got {0}")]
    BadNz(usize),
    #[error("channel height must be positive, got {0}")]
    BadHeight(f64),
}

/// Serializable grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_z: usize,
    pub height: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), GridError> {
        if self.n_x < 4 || self.n_x % 2 != 0 {
            return Err(GridError::BadNx(self.n_x));
        }
        if self.n_z < 9 {
            return Err(GridError::BadNz(self.n_z));
        }
        if !(self.height > 0.0) {
            return Err(GridError::BadHeight(self.height));
        }
        Ok(())
    }
}

pub(crate) type RealLu = LU<f64, Dyn, Dyn>;

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pad_fwd: Arc<dyn Fft<f64>>,
    pad_inv: Arc<dyn Fft<f64>>,
}

struct GridInner {
    spec: GridSpec,
    cheb: ChebyshevBasis,
    plans: Plans,
    /// Neumann Poisson factorizations for the Leray projection, per |k| >= 1.
    projector: Vec<OnceLock<RealLu>>,
}

/// The periodic channel `T × (0, a)`: Fourier in `x` (period 2π) and
/// Chebyshev–Gauss–Lobatto points in `z`. Cloning shares transform plans.
#[derive(Clone)]
pub struct ChannelGrid {
    inner: Arc<GridInner>,
}

impl std::fmt::Debug for ChannelGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.inner.spec.fmt(f)
    }
}

impl PartialEq for ChannelGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl ChannelGrid {
    pub fn new(spec: GridSpec) -> Result<Self, GridError> {
        spec.validate()?;
        let mut planner = FftPlanner::new();
        let pad = 3 * spec.n_x / 2;
        let plans = Plans {
            fwd: planner.plan_fft_forward(spec.n_x),
            inv: planner.plan_fft_inverse(spec.n_x),
            pad_fwd: planner.plan_fft_forward(pad),
            pad_inv: planner.plan_fft_inverse(pad),
        };
        Ok(Self {
            inner: Arc::new(GridInner {
                spec,
                cheb: ChebyshevBasis::new(spec.n_z, spec.height),
                plans,
                projector: (0..spec.n_x / 2).map(|_| OnceLock::new()).collect(),
            }),
        })
    }

    pub fn with_dims(n_x: usize, n_z: usize, height: f64) -> Result<Self, GridError> {
        Self::new(GridSpec { n_x, n_z, height })
    }

    pub fn spec(&self) -> GridSpec {
        self.inner.spec
    }

    pub fn n_x(&self) -> usize {
        self.inner.spec.n_x
    }

    pub fn n_z(&self) -> usize {
        self.inner.spec.n_z
    }

    pub fn height(&self) -> f64 {
        self.inner.spec.height
    }

    pub fn cheb(&self) -> &ChebyshevBasis {
        &self.inner.cheb
    }

    pub fn z(&self) -> &[f64] {
        self.inner.cheb.nodes()
    }

    pub fn x(&self) -> Vec<f64> {
        let n = self.n_x();
        (0..n).map(|m| 2.0 * std::f64::consts::PI * m as f64 / n as f64).collect()
    }

    /// Number of stored Fourier modes (FFT ordering).
    pub fn n_modes(&self) -> usize {
        self.n_x()
    }

    /// Signed wavenumber of storage slot `i`; the Nyquist slot reports `n_x/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n_x();
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n_x() / 2
    }

    /// Storage slot of wavenumber `k`, `|k| < n_x / 2`.
    pub fn slot(&self, k: i64) -> usize {
        let n = self.n_x() as i64;
        assert!(k.abs() < n / 2, "wavenumber {k} not representable");
        k.rem_euclid(n) as usize
    }

    /// Largest wavenumber kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n_x() / 3) as i64
    }

    pub fn padded_len(&self) -> usize {
        3 * self.n_x() / 2
    }

    /// Smallest spacing in `z` (next to the walls).
    pub fn min_dz(&self) -> f64 {
        self.z()[1] - self.z()[0]
    }

    /// Spectral coefficients `[i * n_z + j]` to physical values `[m * n_z + j]`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.synthesize_on(coeffs, self.n_x(), &self.inner.plans.inv)
    }

    /// Evaluation on the 3/2-padded `x` grid.
    pub fn synthesize_padded(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.synthesize_on(coeffs, self.padded_len(), &self.inner.plans.pad_inv)
    }

    fn synthesize_on(&self, coeffs: &[Complex64], len: usize, plan: &Arc<dyn Fft<f64>>) -> Vec<f64> {
        let (nx, nz) = (self.n_x(), self.n_z());
        let mut out = vec![0.0; len * nz];
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for j in 0..nz {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            for i in 0..nx {
                if self.is_nyquist(i) {
                    continue;
                }
                let k = self.wavenumber(i);
                buf[k.rem_euclid(len as i64) as usize] = coeffs[i * nz + j];
            }
            plan.process(&mut buf);
            for m in 0..len {
                out[m * nz + j] = buf[m].re;
            }
        }
        out
    }

    /// Physical values `[m * n_z + j]` to coefficients, Nyquist slot zeroed.
    pub fn analyze(&self, values: &[f64]) -> Vec<Complex64> {
        self.analyze_on(values, self.n_x(), &self.inner.plans.fwd)
    }

    pub fn analyze_padded(&self, values: &[f64]) -> Vec<Complex64> {
        self.analyze_on(values, self.padded_len(), &self.inner.plans.pad_fwd)
    }

    fn analyze_on(&self, values: &[f64], len: usize, plan: &Arc<dyn Fft<f64>>) -> Vec<Complex64> {
        let (nx, nz) = (self.n_x(), self.n_z());
        let mut out = vec![Complex64::new(0.0, 0.0); nx * nz];
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        let norm = 1.0 / len as f64;
        for j in 0..nz {
            for m in 0..len {
                buf[m] = Complex64::new(values[m * nz + j], 0.0);
            }
            plan.process(&mut buf);
            for i in 0..nx {
                if self.is_nyquist(i) {
                    continue;
                }
                let k = self.wavenumber(i);
                out[i * nz + j] = buf[k.rem_euclid(len as i64) as usize] * norm;
            }
        }
        out
    }

    /// Matrix of `(D² - k²)` with first/last rows replaced by `D` rows
    /// (Neumann data), factorized once per `|k| >= 1`.
    pub(crate) fn projector_lu(&self, k_abs: usize) -> &RealLu {
        self.inner.projector[k_abs].get_or_init(|| {
            let n = self.n_z();
            let cheb = self.cheb();
            let k2 = (k_abs * k_abs) as f64;
            let mut m = DMatrix::from_row_slice(n, n, cheb.d2());
            for i in 0..n {
                m[(i, i)] -= k2;
            }
            for &row in &[0, n - 1] {
                for j in 0..n {
                    m[(row, j)] = cheb.d1()[row * n + j];
                }
            }
            m.lu()
        })
    }
}

/// Solves a real LU system for a complex right-hand side.
pub(crate) fn lu_solve_complex(lu: &RealLu, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let re = nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.re));
    let im = nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.im));
    let xr = lu.solve(&re)?;
    let xi = lu.solve(&im)?;
    Some(xr.iter().zip(xi.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims() {
        assert!(matches!(ChannelGrid::with_dims(7, 17, 1.0), Err(GridError::BadNx(7))));
        assert!(matches!(ChannelGrid::with_dims(8, 8, 1.0), Err(GridError::BadNz(8))));
        assert!(matches!(ChannelGrid::with_dims(8, 9, 0.0), Err(GridError::BadHeight(_))));
    }

    #[test]
    fn transforms_round_trip() {
        let g = ChannelGrid::with_dims(16, 9, 1.0).unwrap();
        let x = g.x();
        let vals: Vec<f64> = (0..16 * 9)
            .map(|idx| {
                let (m, j) = (idx / 9, idx % 9);
                (2.0 * x[m]).cos() * g.z()[j] + (3.0 * x[m]).sin()
            })
            .collect();
        let c = g.analyze(&vals);
        let back = g.synthesize(&c);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
        let padded = g.synthesize_padded(&c);
        let again = g.analyze_padded(&padded);
        for (a, b) in c.iter().zip(&again) {
            assert!((a - b).norm() < 1e-14);
        }
        // cos(2x) z -> coefficient z/2 at k = ±2
        assert!((c[g.slot(2) * 9 + 4].re - 0.5 * g.z()[4]).abs() < 1e-14);
        assert!((c[g.slot(-3) * 9 + 4] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
    }
}

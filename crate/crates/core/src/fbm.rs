//! Fractional Brownian motion on uniform grids and the cylindrical boundary
//! noise assembled from independent per-mode paths.
//!
//! Paths are sampled exactly in law by circulant embedding of fractional
//! Gaussian noise (Davies–Harte). A dense Cholesky sampler is kept as an
//! independent oracle for small grids.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest grid accepted by the dense Cholesky oracle.
pub const CHOLESKY_MAX_STEPS: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FbmError {
    #[error("times must be non-negative, got ({0}, {1})")]
    NegativeTime(f64, f64),
    #[error("Hurst parameter must lie in (0, 1), got {0}")]
    BadHurst(f64),
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("need at least one step")]
    NoSteps,
    #[error("dense oracle limited to {CHOLESKY_MAX_STEPS} steps, got {0}")]
    TooManySteps(usize),
    #[error("covariance matrix is not numerically positive definite")]
    NotPositiveDefinite,
    #[error("amplitudes violate Hermitian symmetry at mode {0}")]
    NotHermitian(i64),
    #[error("amplitude vector must have odd length 2 N_g + 1, got {0}")]
    BadAmplitudeLength(usize),
    #[error("coarsening factor {factor} does not divide {n_steps} steps")]
    BadCoarsening { factor: usize, n_steps: usize },
}

/// `E[b(s) b(t)] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(s_time: f64, t_time: f64, hurst: f64) -> Result<f64, FbmError> {
    if s_time < 0.0 || t_time < 0.0 {
        return Err(FbmError::NegativeTime(s_time, t_time));
    }
    let h2 = 2.0 * hurst;
    Ok(0.5 * (t_time.powf(h2) + s_time.powf(h2) - (t_time - s_time).abs().powf(h2)))
}

/// Autocovariance of unit-step fractional Gaussian noise at integer lag.
fn fgn_autocovariance(lag: usize, hurst: f64) -> f64 {
    let k = lag as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

fn check_grid(hurst: f64, horizon: f64, n_steps: usize) -> Result<(), FbmError> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(FbmError::BadHurst(hurst));
    }
    if !(horizon > 0.0) {
        return Err(FbmError::BadHorizon(horizon));
    }
    if n_steps == 0 {
        return Err(FbmError::NoSteps);
    }
    Ok(())
}

/// Scalar fBm sampled at `t_k = k T / n_steps`, `k = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmGridPath {
    pub hurst: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub values: Vec<f64>,
}

impl FbmGridPath {
    fn from_increments(hurst: f64, horizon: f64, incs: &[f64]) -> Self {
        let mut values = Vec::with_capacity(incs.len() + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for &d in incs {
            acc += d;
            values.push(acc);
        }
        Self {
            hurst,
            horizon,
            n_steps: incs.len(),
            values,
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| k as f64 * self.dt()).collect()
    }

    /// Keeps every `factor`-th grid value. Coarse and fine paths share one
    /// realization, which is what refinement studies need.
    pub fn coarsen(&self, factor: usize) -> Result<Self, FbmError> {
        if factor == 0 || self.n_steps % factor != 0 {
            return Err(FbmError::BadCoarsening {
                factor,
                n_steps: self.n_steps,
            });
        }
        Ok(Self {
            hurst: self.hurst,
            horizon: self.horizon,
            n_steps: self.n_steps / factor,
            values: self.values.iter().step_by(factor).copied().collect(),
        })
    }
}

/// First differences of the path values.
pub fn increments(path: &FbmGridPath) -> Vec<f64> {
    path.values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Circulant embedding of fGn on a fixed grid. The sampler is a linear map
/// from `4 n_steps` standard normals to a path, which makes its covariance
/// checkable deterministically.
#[derive(Clone)]
pub struct DaviesHarte {
    hurst: f64,
    horizon: f64,
    n_steps: usize,
    sqrt_eigs: Vec<f64>,
    fft: Arc<dyn rustfft::Fft<f64>>,
}

impl std::fmt::Debug for DaviesHarte {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DaviesHarte")
            .field("hurst", &self.hurst)
            .field("horizon", &self.horizon)
            .field("n_steps", &self.n_steps)
            .finish()
    }
}

impl DaviesHarte {
    /// Returns `Err(NotPositiveDefinite)` if the embedding has a negative
    /// eigenvalue (not expected for fGn, but checked).
    pub fn new(hurst: f64, horizon: f64, n_steps: usize) -> Result<Self, FbmError> {
        check_grid(hurst, horizon, n_steps)?;
        let n = n_steps;
        let m = 2 * n;
        let scale = (horizon / n as f64).powf(2.0 * hurst);
        let mut c: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= n { j } else { m - j };
                Complex64::new(scale * fgn_autocovariance(lag, hurst), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut c);
        let max = c.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        let mut sqrt_eigs = Vec::with_capacity(m);
        for z in &c {
            if z.re < -1e-10 * max {
                return Err(FbmError::NotPositiveDefinite);
            }
            sqrt_eigs.push((z.re.max(0.0) / m as f64).sqrt());
        }
        Ok(Self {
            hurst,
            horizon,
            n_steps,
            sqrt_eigs,
            fft: planner.plan_fft_inverse(m),
        })
    }

    /// Number of standard normals consumed per path.
    pub fn input_len(&self) -> usize {
        4 * self.n_steps
    }

    /// Maps normals `(re_0, im_0, re_1, im_1, ...)` to a path.
    pub fn apply(&self, normals: &[f64]) -> FbmGridPath {
        assert_eq!(normals.len(), self.input_len());
        let mut buf: Vec<Complex64> = self
            .sqrt_eigs
            .iter()
            .zip(normals.chunks_exact(2))
            .map(|(&s, z)| Complex64::new(s * z[0], s * z[1]))
            .collect();
        self.fft.process(&mut buf);
        let incs: Vec<f64> = buf[..self.n_steps].iter().map(|z| z.re).collect();
        FbmGridPath::from_increments(self.hurst, self.horizon, &incs)
    }

    pub fn sample(&self, seed: u64) -> FbmGridPath {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let normals: Vec<f64> = (0..self.input_len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        self.apply(&normals)
    }
}

/// Dense Cholesky factor of the fBm covariance on the grid (values at
/// `t_1..t_n`; `t_0 = 0` is deterministic).
#[derive(Debug, Clone)]
pub struct CholeskyFbm {
    hurst: f64,
    horizon: f64,
    n_steps: usize,
    factor: DMatrix<f64>,
}

/// Covariance matrix of the path values at `t_1..t_n`.
pub fn covariance_matrix(hurst: f64, horizon: f64, n_steps: usize) -> Result<DMatrix<f64>, FbmError> {
    check_grid(hurst, horizon, n_steps)?;
    let dt = horizon / n_steps as f64;
    let mut m = DMatrix::zeros(n_steps, n_steps);
    for i in 0..n_steps {
        for j in 0..=i {
            let c = fbm_covariance((i + 1) as f64 * dt, (j + 1) as f64 * dt, hurst)?;
            m[(i, j)] = c;
            m[(j, i)] = c;
        }
    }
    Ok(m)
}

impl CholeskyFbm {
    pub fn new(hurst: f64, horizon: f64, n_steps: usize) -> Result<Self, FbmError> {
        if n_steps > CHOLESKY_MAX_STEPS {
            return Err(FbmError::TooManySteps(n_steps));
        }
        let cov = covariance_matrix(hurst, horizon, n_steps)?;
        let chol = cov.cholesky().ok_or(FbmError::NotPositiveDefinite)?;
        Ok(Self {
            hurst,
            horizon,
            n_steps,
            factor: chol.l(),
        })
    }

    pub fn input_len(&self) -> usize {
        self.n_steps
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn apply(&self, normals: &[f64]) -> FbmGridPath {
        assert_eq!(normals.len(), self.n_steps);
        let z = nalgebra::DVector::from_column_slice(normals);
        let x = &self.factor * z;
        let mut values = Vec::with_capacity(self.n_steps + 1);
        values.push(0.0);
        values.extend(x.iter());
        FbmGridPath {
            hurst: self.hurst,
            horizon: self.horizon,
            n_steps: self.n_steps,
            values,
        }
    }

    pub fn sample(&self, seed: u64) -> FbmGridPath {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let normals: Vec<f64> = (0..self.n_steps)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        self.apply(&normals)
    }
}

/// Exact fBm sample on the uniform grid; deterministic in `seed`.
///
/// Falls back to the Cholesky oracle (with a logged notice) if the circulant
/// embedding ever fails to be nonnegative definite.
pub fn sample_fbm(hurst: f64, horizon: f64, n_steps: usize, seed: u64) -> Result<FbmGridPath, FbmError> {
    match DaviesHarte::new(hurst, horizon, n_steps) {
        Ok(dh) => Ok(dh.sample(seed)),
        Err(FbmError::NotPositiveDefinite) => {
            log::warn!("circulant embedding not nonnegative definite; using dense Cholesky sampler");
            sample_fbm_cholesky_oracle(hurst, horizon, n_steps, seed)
        }
        Err(e) => Err(e),
    }
}

pub fn sample_fbm_cholesky_oracle(
    hurst: f64,
    horizon: f64,
    n_steps: usize,
    seed: u64,
) -> Result<FbmGridPath, FbmError> {
    Ok(CholeskyFbm::new(hurst, horizon, n_steps)?.sample(seed))
}

/// Counter-based seed splitting (SplitMix64 finalizer over `master` and
/// `stream`). Streams never interact, so adding modes leaves existing ones
/// untouched.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Diagonal coefficient operator `g`: amplitude `σ_n` on boundary Fourier
/// mode `n`, `|n| <= mode_cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseCoefficients {
    pub sobolev_deficit: f64,
    pub mode_cutoff: usize,
    /// `amplitudes[n + mode_cutoff] = σ_n`.
    pub amplitudes: Vec<Complex64>,
}

impl NoiseCoefficients {
    pub fn new(sobolev_deficit: f64, amplitudes: Vec<Complex64>) -> Result<Self, FbmError> {
        if amplitudes.len() % 2 == 0 {
            return Err(FbmError::BadAmplitudeLength(amplitudes.len()));
        }
        let c = Self {
            sobolev_deficit,
            mode_cutoff: amplitudes.len() / 2,
            amplitudes,
        };
        c.check_hermitian()?;
        Ok(c)
    }

    /// `σ_n = σ_0 (1 + n²)^(-decay)` for `|n| <= cutoff`.
    pub fn power_law(sigma0: f64, decay: f64, cutoff: usize, sobolev_deficit: f64) -> Self {
        let amplitudes = (-(cutoff as i64)..=cutoff as i64)
            .map(|n| Complex64::new(sigma0 * (1.0 + (n * n) as f64).powf(-decay), 0.0))
            .collect();
        Self {
            sobolev_deficit,
            mode_cutoff: cutoff,
            amplitudes,
        }
    }

    pub fn zeros(cutoff: usize, sobolev_deficit: f64) -> Self {
        Self::power_law(0.0, 0.0, cutoff, sobolev_deficit)
    }

    pub fn amplitude(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.mode_cutoff {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes[(n + self.mode_cutoff as i64) as usize]
    }

    pub fn check_hermitian(&self) -> Result<(), FbmError> {
        let nc = self.mode_cutoff as i64;
        for n in 0..=nc {
            let a = self.amplitude(n);
            let b = self.amplitude(-n);
            let tol = 1e-14 * (a.norm() + b.norm()).max(f64::MIN_POSITIVE);
            if (a - b.conj()).norm() > tol {
                return Err(FbmError::NotHermitian(n));
            }
        }
        Ok(())
    }

    /// `Σ_n |σ_n|² (1 + n²)^(-s)`.
    pub fn hilbert_schmidt_proxy(&self) -> f64 {
        let nc = self.mode_cutoff as i64;
        (-nc..=nc)
            .map(|n| self.amplitude(n).norm_sqr() * (1.0 + (n * n) as f64).powf(-self.sobolev_deficit))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }
}

/// One scalar path feeding the real (`part = 0`) or imaginary (`part = 1`)
/// half of boundary mode `mode >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModePath {
    pub mode: usize,
    pub part: usize,
    pub stream: u64,
    pub seed: u64,
    pub path: FbmGridPath,
}

/// `g W^H(t)` as a boundary Fourier series with independent fBm drivers:
/// `ĝ_0 = σ_0 b_0`, `ĝ_n = σ_n (b_{n,re} + i b_{n,im}) / √2` for `n > 0`,
/// and `ĝ_{-n} = conj(ĝ_n)`, so every retained mode has variance `|σ_n|² t^{2H}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylindricalBoundaryNoise {
    pub coefficients: NoiseCoefficients,
    pub hurst: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub paths: Vec<ModePath>,
}

fn stream_id(mode: usize, part: usize) -> u64 {
    (2 * mode + part) as u64
}

pub fn sample_boundary_noise(
    coeffs: &NoiseCoefficients,
    hurst: f64,
    horizon: f64,
    n_steps: usize,
    seed: u64,
) -> Result<CylindricalBoundaryNoise, FbmError> {
    coeffs.check_hermitian()?;
    let sampler = DaviesHarte::new(hurst, horizon, n_steps);
    let slots: Vec<(usize, usize)> = std::iter::once((0, 0))
        .chain((1..=coeffs.mode_cutoff).flat_map(|n| [(n, 0), (n, 1)]))
        .collect();
    let paths = slots
        .par_iter()
        .map(|&(mode, part)| {
            let stream = stream_id(mode, part);
            let sub = derive_seed(seed, stream);
            let path = match &sampler {
                Ok(dh) => dh.sample(sub),
                Err(FbmError::NotPositiveDefinite) => {
                    log::warn!("circulant embedding failed; dense sampler for mode {mode}");
                    sample_fbm_cholesky_oracle(hurst, horizon, n_steps, sub)?
                }
                Err(e) => return Err(e.clone()),
            };
            Ok(ModePath {
                mode,
                part,
                stream,
                seed: sub,
                path,
            })
        })
        .collect::<Result<Vec<_>, FbmError>>()?;
    Ok(CylindricalBoundaryNoise {
        coefficients: coeffs.clone(),
        hurst,
        horizon,
        n_steps,
        seed,
        paths,
    })
}

impl CylindricalBoundaryNoise {
    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    fn path(&self, mode: usize, part: usize) -> &FbmGridPath {
        // slots are laid out as (0,0), (1,0), (1,1), (2,0), ...
        let idx = if mode == 0 { 0 } else { 2 * mode - 1 + part };
        &self.paths[idx].path
    }

    /// Boundary coefficient `ĝ_n(t_k)` of the driving field.
    pub fn coefficient(&self, n: i64, step: usize) -> Complex64 {
        let m = n.unsigned_abs() as usize;
        if m > self.coefficients.mode_cutoff {
            return Complex64::new(0.0, 0.0);
        }
        let sigma = self.coefficients.amplitude(n);
        if m == 0 {
            return sigma * self.path(0, 0).values[step];
        }
        let re = self.path(m, 0).values[step];
        let im = self.path(m, 1).values[step];
        let z = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        // σ_{-n} = conj(σ_n), so ĝ_{-n} = conj(ĝ_n)
        if n > 0 {
            sigma * z
        } else {
            sigma * z.conj()
        }
    }

    /// `ĝ_n(t_{k+1}) - ĝ_n(t_k)`.
    pub fn coefficient_increment(&self, n: i64, step: usize) -> Complex64 {
        self.coefficient(n, step + 1) - self.coefficient(n, step)
    }

    pub fn coarsen(&self, factor: usize) -> Result<Self, FbmError> {
        let paths = self
            .paths
            .iter()
            .map(|p| {
                Ok(ModePath {
                    path: p.path.coarsen(factor)?,
                    ..p.clone()
                })
            })
            .collect::<Result<Vec<_>, FbmError>>()?;
        Ok(Self {
            n_steps: self.n_steps / factor,
            paths,
            ..self.clone()
        })
    }

    /// Same driving paths, amplitudes multiplied by `factor`.
    pub fn with_scaled_amplitudes(&self, factor: f64) -> Self {
        Self {
            coefficients: self.coefficients.scaled(factor),
            ..self.clone()
        }
    }
}

/// Variogram Hurst estimate: half the log-log slope of the mean squared
/// increment against lag, pooled over `paths`, for lags `1..=max_lag`.
pub fn estimate_hurst<'a>(paths: impl IntoIterator<Item = &'a FbmGridPath>, max_lag: usize) -> Option<f64> {
    let mut sums = vec![0.0; max_lag + 1];
    let mut counts = vec![0usize; max_lag + 1];
    for p in paths {
        for lag in 1..=max_lag.min(p.n_steps.saturating_sub(1)) {
            for w in 0..p.values.len() - lag {
                let d = p.values[w + lag] - p.values[w];
                sums[lag] += d * d;
                counts[lag] += 1;
            }
        }
    }
    let pts: Vec<(f64, f64)> = (1..=max_lag)
        .filter(|&l| counts[l] > 0 && sums[l] > 0.0)
        .map(|l| ((l as f64).ln(), (sums[l] / counts[l] as f64).ln()))
        .collect();
    crate::stats::linear_fit(&pts).map(|(slope, _)| 0.5 * slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn covariance_examples() {
        assert_relative_eq!(fbm_covariance(1.0, 1.0, 0.9).unwrap(), 1.0);
        assert_relative_eq!(fbm_covariance(0.3, 0.7, 0.5).unwrap(), 0.3, epsilon = 1e-15);
        assert_relative_eq!(fbm_covariance(0.5, 1.0, 0.75).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(
            fbm_covariance(0.2, 0.9, 0.8).unwrap(),
            fbm_covariance(0.9, 0.2, 0.8).unwrap()
        );
        assert!(matches!(
            fbm_covariance(-0.1, 0.2, 0.8),
            Err(FbmError::NegativeTime(..))
        ));
    }

    #[test]
    fn davies_harte_is_deterministic() {
        let a = sample_fbm(0.8, 1.0, 64, 11).unwrap();
        let b = sample_fbm(0.8, 1.0, 64, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a.values.len(), 65);
        let c = sample_fbm(0.8, 1.0, 64, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn increments_telescope() {
        let p = sample_fbm(0.7, 2.0, 33, 5).unwrap();
        let inc = increments(&p);
        assert_eq!(inc.len(), 33);
        let mut acc = 0.0;
        for (k, d) in inc.iter().enumerate() {
            acc += d;
            assert_eq!(acc, p.values[k + 1]);
        }
    }

    #[test]
    fn brownian_increments_uncorrelated() {
        let dh = DaviesHarte::new(0.5, 1.0, 64).unwrap();
        let (mut c0, mut c1) = (0.0, 0.0);
        let reps = 4000;
        for s in 0..reps {
            let inc = increments(&dh.sample(s));
            for w in inc.windows(2) {
                c0 += w[0] * w[0];
                c1 += w[0] * w[1];
            }
        }
        // lag-1 correlation ~ 0 with standard error ~ 1/sqrt(reps * 63)
        let rho = c1 / c0;
        assert!(rho.abs() < 4.0 / ((reps * 63) as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn oracle_guards() {
        assert!(matches!(
            CholeskyFbm::new(0.8, 1.0, 513),
            Err(FbmError::TooManySteps(513))
        ));
        assert!(matches!(sample_fbm(0.8, 1.0, 0, 1), Err(FbmError::NoSteps)));
    }

    #[test]
    fn hermitian_check() {
        let mut amps = vec![Complex64::new(1.0, 0.0); 5];
        amps[3] = Complex64::new(0.5, 0.1);
        amps[1] = Complex64::new(0.5, 0.1);
        assert!(matches!(
            NoiseCoefficients::new(0.0, amps.clone()),
            Err(FbmError::NotHermitian(1))
        ));
        amps[1] = Complex64::new(0.5, -0.1);
        assert!(NoiseCoefficients::new(0.0, amps).is_ok());
    }

    #[test]
    fn zero_amplitudes_give_zero_noise() {
        let coeffs = NoiseCoefficients::zeros(4, 0.0);
        let noise = sample_boundary_noise(&coeffs, 0.9, 1.0, 16, 3).unwrap();
        for n in -4..=4 {
            for k in 0..=16 {
                assert_eq!(noise.coefficient(n, k), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn single_mode_is_scalar_fbm() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 5];
        amps[2] = Complex64::new(0.3, 0.0);
        let coeffs = NoiseCoefficients::new(0.0, amps).unwrap();
        let noise = sample_boundary_noise(&coeffs, 0.9, 1.0, 16, 3).unwrap();
        let base = &noise.paths[0].path;
        for k in 0..=16 {
            assert_eq!(noise.coefficient(0, k).re, 0.3 * base.values[k]);
            assert_eq!(noise.coefficient(0, k).im, 0.0);
            assert_eq!(noise.coefficient(1, k), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn noise_is_hermitian_and_stable_under_more_modes() {
        let small = NoiseCoefficients::power_law(0.1, 0.5, 2, 0.0);
        let big = NoiseCoefficients::power_law(0.1, 0.5, 6, 0.0);
        let a = sample_boundary_noise(&small, 0.85, 1.0, 32, 99).unwrap();
        let b = sample_boundary_noise(&big, 0.85, 1.0, 32, 99).unwrap();
        for n in -2..=2i64 {
            for k in 0..=32 {
                assert_eq!(a.coefficient(n, k), b.coefficient(n, k));
                assert_eq!(a.coefficient(-n, k), a.coefficient(n, k).conj());
            }
        }
    }

    #[test]
    fn coarsening_subsamples() {
        let p = sample_fbm(0.9, 1.0, 64, 1).unwrap();
        let c = p.coarsen(4).unwrap();
        assert_eq!(c.n_steps, 16);
        assert_eq!(c.values[3], p.values[12]);
        assert!(p.coarsen(3).is_err());
    }

    #[test]
    fn hurst_estimate_recovers_parameter() {
        let dh = DaviesHarte::new(0.8, 1.0, 1024).unwrap();
        let paths: Vec<_> = (0..40).map(|s| dh.sample(s)).collect();
        let h = estimate_hurst(&paths, 16).unwrap();
        assert!((h - 0.8).abs() < 0.03, "h = {h}");
    }

    #[test]
    fn hilbert_schmidt_proxy_of_default_law() {
        let c = NoiseCoefficients::power_law(0.1, 0.5, 8, 0.0);
        let direct: f64 = (-8..=8i64).map(|n| 0.01 / (1.0 + (n * n) as f64)).sum();
        assert_relative_eq!(c.hilbert_schmidt_proxy(), direct, max_relative = 1e-14);
    }
}

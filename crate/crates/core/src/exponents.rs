//! Exponent bookkeeping for the boundary-noise splitting scheme.
//!
//! Everything that depends on the Hurst parameter `H`, the boundary
//! smoothness deficit `s` and the working Lebesgue exponent `r` lives here:
//! the critical integrability `q_H = 2 / (2s + 5 - 4H)`, the splitting depth
//! `N`, the per-level Stokes exponents `q_i`, the Lebesgue exponents `r_i`
//! and the minimal time exponent `p`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when `r` sits on (or within rounding of) an interval endpoint.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("Hurst parameter must satisfy 3/4 < H < 1, got H = {0}")]
    HurstOutOfRange(f64),
    #[error("Sobolev deficit must satisfy 0 <= s < 1/2, got s = {0}")]
    DeficitOutOfRange(f64),
    #[error("admissibility H - s/2 > 3/4 violated: H - s/2 = {0}")]
    Inadmissible(f64),
    #[error("working exponent must satisfy 2 < r < 4, got r = {0}")]
    ROutOfRange(f64),
    #[error("working exponent must satisfy r < 2 q_H = {bound}, got r = {r}")]
    RAboveCritical { r: f64, bound: f64 },
    #[error("depth N = {depth} does not match r = {r} (expected N = {expected})")]
    DepthMismatch { r: f64, depth: usize, expected: usize },
    #[error("rational exponent needs a positive denominator, got {num}/{den}")]
    BadRational { num: i64, den: i64 },
}

/// Hurst parameter and boundary smoothness deficit of the noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub hurst: f64,
    pub sobolev_deficit: f64,
}

impl NoiseParams {
    /// Builds and validates the pair; nothing is clamped.
    pub fn new(hurst: f64, sobolev_deficit: f64) -> Result<Self, ExponentError> {
        let p = Self {
            hurst,
            sobolev_deficit,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ExponentError> {
        let (h, s) = (self.hurst, self.sobolev_deficit);
        if !(h > 0.75 && h < 1.0) {
            return Err(ExponentError::HurstOutOfRange(h));
        }
        if !(s >= 0.0 && s < 0.5) {
            return Err(ExponentError::DeficitOutOfRange(s));
        }
        let margin = h - 0.5 * s;
        if !(margin > 0.75) {
            return Err(ExponentError::Inadmissible(margin));
        }
        Ok(())
    }
}

/// Critical integrability exponent `q_H = 2 / (2s + 5 - 4H)`, always in (1, 2).
pub fn critical_integrability(noise: &NoiseParams) -> Result<f64, ExponentError> {
    noise.validate()?;
    Ok(2.0 / (2.0 * noise.sobolev_deficit + 5.0 - 4.0 * noise.hurst))
}

fn check_r(r: f64) -> Result<(), ExponentError> {
    if r > 2.0 && r < 4.0 {
        Ok(())
    } else {
        Err(ExponentError::ROutOfRange(r))
    }
}

/// Depth `N >= 1` such that `r ∈ [2(N+2)/(N+1), 2(N+1)/N)`.
///
/// `r` lies in the interval for `N` iff `N >= (4-r)/(r-2) > N-1`. When
/// `(4-r)/(r-2)` is within [`ENDPOINT_TOL`] of an integer, `r` is read as the
/// closed left endpoint of that interval.
pub fn splitting_depth(r: f64) -> Result<usize, ExponentError> {
    check_r(r)?;
    let x = (4.0 - r) / (r - 2.0);
    let nearest = x.round();
    let depth = if (x - nearest).abs() <= ENDPOINT_TOL * x.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    Ok((depth as usize).max(1))
}

/// Exact variant of [`splitting_depth`] for `r = num / den`.
pub fn splitting_depth_rational(num: i64, den: i64) -> Result<usize, ExponentError> {
    if den <= 0 {
        return Err(ExponentError::BadRational { num, den });
    }
    // 2 < num/den < 4
    if !(num > 2 * den && num < 4 * den) {
        return Err(ExponentError::ROutOfRange(num as f64 / den as f64));
    }
    // N = ceil((4 den - num) / (num - 2 den))
    let p = 4 * den - num;
    let q = num - 2 * den;
    let depth = (p + q - 1) / q;
    Ok(depth.max(1) as usize)
}

fn check_depth(r: f64, depth: usize) -> Result<(), ExponentError> {
    let expected = splitting_depth(r)?;
    if expected != depth {
        return Err(ExponentError::DepthMismatch { r, depth, expected });
    }
    Ok(())
}

/// `q_i = 2r / (r + 2 + (i+1)(2-r))` for `i = 0..N`.
pub fn stokes_exponents(r: f64, depth: usize) -> Result<Vec<f64>, ExponentError> {
    check_depth(r, depth)?;
    Ok((0..depth)
        .map(|i| 2.0 * r / (r + 2.0 + (i as f64 + 1.0) * (2.0 - r)))
        .collect())
}

/// `r_i = 2r / ((i+1)(2-r) + 2)` for `i = 0..N`.
pub fn lebesgue_exponents(r: f64, depth: usize) -> Result<Vec<f64>, ExponentError> {
    check_depth(r, depth)?;
    Ok((0..depth)
        .map(|i| 2.0 * r / ((i as f64 + 1.0) * (2.0 - r) + 2.0))
        .collect())
}

/// Smallest admissible time integrability `2^N r / (r - 2)`.
pub fn min_time_exponent(r: f64, depth: usize) -> Result<f64, ExponentError> {
    check_depth(r, depth)?;
    Ok(2f64.powi(depth as i32) * r / (r - 2.0))
}

/// All exponents of one run, validated together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentLedger {
    pub noise: NoiseParams,
    pub q_star: f64,
    pub r: f64,
    pub depth: usize,
    pub stokes_exps: Vec<f64>,
    pub lebesgue_exps: Vec<f64>,
    pub p_min: f64,
    pub time_exp: f64,
}

impl ExponentLedger {
    pub fn new(noise: NoiseParams, r: f64) -> Result<Self, ExponentError> {
        let q_star = critical_integrability(&noise)?;
        check_r(r)?;
        if r >= 2.0 * q_star {
            return Err(ExponentError::RAboveCritical {
                r,
                bound: 2.0 * q_star,
            });
        }
        let depth = splitting_depth(r)?;
        let q = 0.5 * r;
        Ok(Self {
            noise,
            q_star,
            r,
            depth,
            stokes_exps: stokes_exponents(r, depth)?,
            lebesgue_exps: lebesgue_exponents(r, depth)?,
            p_min: min_time_exponent(r, depth)?,
            time_exp: 2.0 * q / (q - 1.0),
        })
    }

    /// Largest relative violation of `1/q_{i+1} = 1/r_i + 1/r` over the ledger.
    pub fn chain_defect(&self) -> f64 {
        self.stokes_exps
            .windows(2)
            .zip(&self.lebesgue_exps)
            .map(|(q, ri)| {
                let lhs = 1.0 / q[1];
                let rhs = 1.0 / ri + 1.0 / self.r;
                (lhs - rhs).abs() / lhs.abs()
            })
            .fold(0.0, f64::max)
    }
}

//! Navier–Stokes in a periodic channel driven by fractional Brownian noise
//! on the upper wall: exponent bookkeeping, noise sampling, the boundary
//! convolution, the splitting cascade and regularity diagnostics.

pub mod config;
pub mod convolution;
pub mod diagnostics;
pub mod dirichlet;
pub mod exponents;
pub mod fbm;
pub mod run;
pub mod snapshot;
pub mod solver;
pub mod spectral;
pub mod stats;
pub mod testing;

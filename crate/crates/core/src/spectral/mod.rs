//! Fourier–Chebyshev discretization of the periodic channel.

pub mod chebyshev;
pub mod field;
pub mod grid;
pub mod ops;

pub use chebyshev::ChebyshevBasis;
pub use field::{sum_fields, ScalarField, VelocityField};
pub use grid::{ChannelGrid, GridError, GridSpec};
pub use ops::{
    apply_stokes, bilinear_b, bilinear_b_form, curl, divergence, from_streamfunction, gradient_energy,
    helmholtz_split, laplacian, lebesgue_norm, lebesgue_profile, leray_project, nonlinear_term, sobolev_norm,
    spectral_tail, stokes_step, streamfunction_from_modes, trilinear_b, NonlinearForm, SpectralError,
    StokesStepper, TimeScheme,
};

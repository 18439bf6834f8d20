//! Fourier representation of vector fields on flat tori, grid transforms and norms.

mod fft;
pub mod field;
pub mod freq;
pub mod grid;
pub mod norms;
pub mod serial;

pub use field::{Cochain, Coeff, VectorFieldSpectrum};
pub use freq::{lattice_ball, lattice_shell, multi_indices, sq_bound, Freq};
pub use grid::{eval_at_points, eval_on_grid, from_samples, from_samples_with_loss, Grid, GridValues, Sampled};
pub use norms::{
    c_r_norm, cochain_c_r_norm, cochain_sobolev_norm, cochain_sup_norm, cochain_weighted_norm,
    derivative_sup, interpolation_check, sobolev_norm, sup_norm, weighted_norm, InterpolationReport,
    NormFlavor,
};
pub use num_complex::Complex64 as C64;
pub use serial::{cochain_from_json, cochain_to_json, spectrum_from_json, spectrum_to_json, ModeJson, SpectrumJson};

//! Spectral KAM machinery for perturbations of isometric group actions on flat tori.
//!
//! Vector fields are stored by Fourier coefficients, the group complex is assembled
//! blockwise per Laplace eigenspace, and the KAM iteration conjugates a perturbed
//! action back to its isometric model.

pub mod cli;
pub mod complex;
pub mod error;
pub mod geometry;
pub mod kam;
pub mod models;
pub mod spectral;

pub use error::{Error, Result};

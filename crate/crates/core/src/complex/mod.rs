//! Group presentations, multiplier actions, the cochain complex d0, d1 with adjoints,
//! per-block spectra and Diophantine scans.

mod action;
mod blocks;
mod defect;
mod diophantine;
mod ops;
mod presentation;

pub use action::{ActionKind, Angle, DiagonalPhase, ModeLabel, ModeSite, MultiplierAction, Phase};
pub use blocks::{
    block_matrix, block_spectrum, decompose_block, hermitian_eigen, kernel_threshold, mode_d0, mode_d1,
    mode_eigen, mode_operator, BlockDecomposition, BlockOperator, BlockSpectrum, ModeEigen, Which,
};
pub use defect::relation_defect;
pub use diophantine::{diophantine_scan, fit_envelope, BlockEntry, DiophantineReport, Fit, Flavor};
pub use ops::{box_op, d0, d0_star, d0_star_d0, d1, d1_star, push_forward};
pub use presentation::{inverse_word, GroupPresentation, Word};

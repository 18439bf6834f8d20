//! Exponential-map calculus on the flat torus, where Exp{f}(x) = x + f(x).

mod conj;
mod map;
mod rotation;

pub use conj::{conjugate_perturbation, conjugate_perturbation_with_inverse, isometry_conjugation, word_translation};
pub use map::{
    compose, compose_fields, default_invert_tol, eval_shifted, inverse_residual, invert, invert_field, s1,
    CompositionGrid, TorusMap, ALIAS_ENERGY_TOL, DIFFEO_GUARD,
};
pub use rotation::{rotation_number, RotationEstimate};

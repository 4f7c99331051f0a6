//! Small dense linear algebra and the Padé scaling-and-squaring exponential.

mod matrix;
mod pade;

pub use matrix::{condition_number_1, solve_linear, DenseMatrix, Lu};
pub use pade::{
    expm_pade, expm_pade_scaled, pade_coeffs, pade_rational, scaling_exponent, stability_value, PadeOrder,
    ScalingDecision, RCOND_THRESHOLD, SCALED_NORM_BOUND,
};

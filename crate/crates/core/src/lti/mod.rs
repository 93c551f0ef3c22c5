//! Coefficient-level LTI algebra: polynomials, rational transfer functions,
//! state-space models, frequency responses and exact step simulation.
//!
//! Polynomial coefficients are ascending everywhere (`coeffs[k]` multiplies
//! `s^k`).

mod frequency;
mod polynomial;
mod simulate;
mod state_space;
mod transfer_function;

pub use frequency::{
    default_grid, log_grid, magnitude_db, unwrapped_phase_deg, FrequencyResponseTable,
    DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_MIN, DEFAULT_POINTS,
};
pub use polynomial::{coefficient_mismatch, Polynomial, TRIM_TOLERANCE};
pub use simulate::{step_response, step_state_at, zoh_discretize, StepResponseTable};
pub use state_space::{char_poly, eigenvalues, StateSpace};
pub use transfer_function::TransferFunction;

/// Comparison tolerance for coefficient-level identities.
pub const COEFF_RTOL: f64 = 1e-9;

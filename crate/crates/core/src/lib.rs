//! Linear active disturbance-rejection control (ADRC) and its equivalent
//! two-degree-of-freedom PI(D) controllers.
//!
//! * [`lti`] polynomial / transfer-function / state-space toolbox.
//! * [`adrc`] bandwidth-tuned first- and second-order ADRC controllers.
//! * [`pid_equiv`] conversion to PI+F / PID+F parameters with set-point
//!   weighting, and their state-space realizations.
//! * [`analysis`] closed loops, gang-of-seven, Bode data and step sweeps.

pub mod adrc;
pub mod analysis;
pub mod error;
pub mod lti;
pub mod pid_equiv;

pub use error::{Error, Result};

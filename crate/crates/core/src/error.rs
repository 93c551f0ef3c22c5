use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator polynomial is zero")]
    ZeroDenominator,

    #[error(
        "transfer function is improper: numerator degree {num} exceeds denominator degree {den}"
    )]
    Improper { num: usize, den: usize },

    #[error("denominator has degree zero; there are no poles")]
    NoPoles,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{kind} index {index} out of range (have {len})")]
    Index {
        kind: &'static str,
        index: usize,
        len: usize,
    },

    #[error("{name} {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("feedback interconnection has an algebraic loop")]
    AlgebraicLoop,

    #[error("(sI - A) is singular at s = {0}")]
    Singular(String),

    #[error("eigenvalue computation did not converge")]
    Eigen,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be > 0".into(),
        })
    }
}

pub(crate) fn require_nonzero(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be nonzero".into(),
        })
    }
}

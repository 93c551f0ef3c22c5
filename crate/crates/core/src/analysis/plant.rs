use crate::error::{require_positive, Error, Result};
use crate::lti::{Polynomial, StateSpace, TransferFunction};

/// Low-order test plants: `K/(Ts+1)` or `K/(T^2 s^2 + 2 D T s + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlantModel {
    FirstOrder {
        gain: f64,
        time_constant: f64,
    },
    SecondOrder {
        gain: f64,
        time_constant: f64,
        damping: f64,
    },
}

impl PlantModel {
    pub fn first_order(gain: f64, time_constant: f64) -> Result<Self> {
        require_positive("time_constant", time_constant)?;
        if !gain.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gain",
                reason: "must be finite".into(),
            });
        }
        Ok(Self::FirstOrder {
            gain,
            time_constant,
        })
    }

    pub fn second_order(gain: f64, time_constant: f64, damping: f64) -> Result<Self> {
        require_positive("time_constant", time_constant)?;
        if !gain.is_finite() || !damping.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gain",
                reason: "gain and damping must be finite".into(),
            });
        }
        Ok(Self::SecondOrder {
            gain,
            time_constant,
            damping,
        })
    }

    pub fn order(&self) -> u8 {
        match self {
            Self::FirstOrder { .. } => 1,
            Self::SecondOrder { .. } => 2,
        }
    }

    pub fn gain(&self) -> f64 {
        match *self {
            Self::FirstOrder { gain, .. } | Self::SecondOrder { gain, .. } => gain,
        }
    }

    pub fn time_constant(&self) -> f64 {
        match *self {
            Self::FirstOrder { time_constant, .. } | Self::SecondOrder { time_constant, .. } => {
                time_constant
            }
        }
    }

    pub fn with_gain(self, gain: f64) -> Result<Self> {
        match self {
            Self::FirstOrder { time_constant, .. } => Self::first_order(gain, time_constant),
            Self::SecondOrder {
                time_constant,
                damping,
                ..
            } => Self::second_order(gain, time_constant, damping),
        }
    }

    pub fn with_time_constant(self, time_constant: f64) -> Result<Self> {
        match self {
            Self::FirstOrder { gain, .. } => Self::first_order(gain, time_constant),
            Self::SecondOrder { gain, damping, .. } => {
                Self::second_order(gain, time_constant, damping)
            }
        }
    }

    /// High-frequency input gain: `K/T` or `K/T^2`.
    pub fn characteristic_gain(&self) -> f64 {
        match *self {
            Self::FirstOrder {
                gain,
                time_constant,
            } => gain / time_constant,
            Self::SecondOrder {
                gain,
                time_constant,
                ..
            } => gain / (time_constant * time_constant),
        }
    }

    pub fn tf(&self) -> TransferFunction {
        let den = match *self {
            Self::FirstOrder { time_constant, .. } => vec![1.0, time_constant],
            Self::SecondOrder {
                time_constant: t,
                damping,
                ..
            } => vec![1.0, 2.0 * damping * t, t * t],
        };
        TransferFunction::new(Polynomial::constant(self.gain()), Polynomial::new(den))
            .expect("time constant is positive")
    }

    pub fn state_space(&self) -> StateSpace {
        StateSpace::from_tf(&self.tf()).expect("strictly proper")
    }
}

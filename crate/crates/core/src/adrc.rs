//! Linear ADRC controllers tuned by the bandwidth method.
//!
//! Both controllers are built in closed form: the control law is substituted
//! into the extended state observer, leaving a plain LTI system with inputs
//! `[r, y]` and output `u`. Observer gains use the positive convention, i.e.
//! the observer matrix is `A - L C` with `L = [l1, l2, ...]` and all `l_i > 0`.

use nalgebra::DMatrix;

use crate::error::{require_nonzero, require_positive, Error, Result};
use crate::lti::{StateSpace, TransferFunction};

/// Index of the reference input on every [`TwoInputController`].
pub const REFERENCE: usize = 0;
/// Index of the measurement input on every [`TwoInputController`].
pub const MEASUREMENT: usize = 1;

/// User-facing tuning knobs shared by both orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdrcTuning {
    /// Desired closed-loop settling time (s).
    pub settling_time: f64,
    /// How many times faster the observer poles are than the controller poles.
    pub observer_factor: f64,
    /// Characteristic plant gain, e.g. `K/T` for `K/(Ts+1)`.
    pub b0: f64,
}

impl AdrcTuning {
    pub fn new(settling_time: f64, observer_factor: f64, b0: f64) -> Result<Self> {
        require_positive("settling_time", settling_time)?;
        require_positive("observer_factor", observer_factor)?;
        require_nonzero("b0", b0)?;
        Ok(Self {
            settling_time,
            observer_factor,
            b0,
        })
    }
}

/// First-order ADRC gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderDesign {
    pub tuning: AdrcTuning,
    /// Proportional state-feedback gain, `4 / T_s`.
    pub kp: f64,
    /// Observer gains `[l1, l2]`, placing both observer poles at `-g kp`.
    pub observer_gains: [f64; 2],
}

/// Second-order ADRC gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderDesign {
    pub tuning: AdrcTuning,
    /// Closed-loop bandwidth `6 / T_s` (double controller pole at `-bandwidth`).
    pub bandwidth: f64,
    pub kp: f64,
    pub kd: f64,
    /// Observer gains `[l1, l2, l3]`, triple observer pole at `-g bandwidth`.
    pub observer_gains: [f64; 3],
}

pub fn tune_first_order(
    settling_time: f64,
    observer_factor: f64,
    b0: f64,
) -> Result<FirstOrderDesign> {
    Ok(FirstOrderDesign::new(AdrcTuning::new(
        settling_time,
        observer_factor,
        b0,
    )?))
}

pub fn tune_second_order(
    settling_time: f64,
    observer_factor: f64,
    b0: f64,
) -> Result<SecondOrderDesign> {
    Ok(SecondOrderDesign::new(AdrcTuning::new(
        settling_time,
        observer_factor,
        b0,
    )?))
}

impl FirstOrderDesign {
    pub fn new(tuning: AdrcTuning) -> Self {
        let kp = 4.0 / tuning.settling_time;
        let pole = tuning.observer_factor * kp;
        Self {
            tuning,
            kp,
            observer_gains: [2.0 * pole, pole * pole],
        }
    }

    /// Observer dynamics matrix `A - L C` (no feedback substituted).
    pub fn observer_matrix(&self) -> DMatrix<f64> {
        let [l1, l2] = self.observer_gains;
        DMatrix::from_row_slice(2, 2, &[-l1, 1.0, -l2, 0.0])
    }

    /// Observer plus control law as one LTI system, inputs `[r, y]`, output `u`.
    pub fn controller(&self) -> TwoInputController {
        let [l1, l2] = self.observer_gains;
        let (kp, b0) = (self.kp, self.tuning.b0);
        let ss = StateSpace::from_rows(
            2,
            2,
            1,
            &[-l1 - kp, 0.0, -l2, 0.0],
            &[kp, l1, 0.0, l2],
            &[-kp / b0, -1.0 / b0],
            &[kp / b0, 0.0],
        )
        .expect("dimensions are fixed");
        TwoInputController::new(ss).expect("two inputs, one output")
    }
}

impl SecondOrderDesign {
    pub fn new(tuning: AdrcTuning) -> Self {
        let w = 6.0 / tuning.settling_time;
        let pole = tuning.observer_factor * w;
        Self {
            tuning,
            bandwidth: w,
            kp: w * w,
            kd: 2.0 * w,
            observer_gains: [3.0 * pole, 3.0 * pole * pole, pole * pole * pole],
        }
    }

    pub fn observer_matrix(&self) -> DMatrix<f64> {
        let [l1, l2, l3] = self.observer_gains;
        DMatrix::from_row_slice(3, 3, &[-l1, 1.0, 0.0, -l2, 0.0, 1.0, -l3, 0.0, 0.0])
    }

    pub fn controller(&self) -> TwoInputController {
        let [l1, l2, l3] = self.observer_gains;
        let (kp, kd, b0) = (self.kp, self.kd, self.tuning.b0);
        let ss = StateSpace::from_rows(
            3,
            2,
            1,
            &[-l1, 1.0, 0.0, -(l2 + kp), -kd, 0.0, -l3, 0.0, 0.0],
            &[0.0, l1, kp, l2, 0.0, l3],
            &[-kp / b0, -kd / b0, -1.0 / b0],
            &[kp / b0, 0.0],
        )
        .expect("dimensions are fixed");
        TwoInputController::new(ss).expect("two inputs, one output")
    }
}

pub fn build_first_order(design: &FirstOrderDesign) -> TwoInputController {
    design.controller()
}

pub fn build_second_order(design: &SecondOrderDesign) -> TwoInputController {
    design.controller()
}

/// Either order, for code that handles both uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdrcDesign {
    FirstOrder(FirstOrderDesign),
    SecondOrder(SecondOrderDesign),
}

impl AdrcDesign {
    pub fn tune(order: u8, tuning: AdrcTuning) -> Result<Self> {
        match order {
            1 => Ok(Self::FirstOrder(FirstOrderDesign::new(tuning))),
            2 => Ok(Self::SecondOrder(SecondOrderDesign::new(tuning))),
            _ => Err(Error::InvalidParameter {
                name: "order",
                reason: format!("must be 1 or 2, got {order}"),
            }),
        }
    }

    pub fn order(&self) -> u8 {
        match self {
            Self::FirstOrder(_) => 1,
            Self::SecondOrder(_) => 2,
        }
    }

    pub fn tuning(&self) -> AdrcTuning {
        match self {
            Self::FirstOrder(d) => d.tuning,
            Self::SecondOrder(d) => d.tuning,
        }
    }

    pub fn controller(&self) -> TwoInputController {
        match self {
            Self::FirstOrder(d) => d.controller(),
            Self::SecondOrder(d) => d.controller(),
        }
    }

    pub fn observer_matrix(&self) -> DMatrix<f64> {
        match self {
            Self::FirstOrder(d) => d.observer_matrix(),
            Self::SecondOrder(d) => d.observer_matrix(),
        }
    }
}

/// A 2DOF controller `u = C_r r - C_y y`, as a state-space model with inputs
/// `[r, y]` and a single output `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoInputController {
    ss: StateSpace,
}

impl TwoInputController {
    pub fn new(ss: StateSpace) -> Result<Self> {
        if ss.n_inputs() != 2 || ss.n_outputs() != 1 {
            return Err(Error::Dimension(format!(
                "controller needs 2 inputs and 1 output, got {} and {}",
                ss.n_inputs(),
                ss.n_outputs()
            )));
        }
        let ss = ss.with_labels(["r", "y"], ["u"])?;
        Ok(Self { ss })
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.ss
    }

    /// `C_r`: transfer from reference to control signal.
    pub fn reference_tf(&self) -> TransferFunction {
        self.ss.to_tf(REFERENCE, 0).expect("valid channel")
    }

    /// `C_y`: the *negated* transfer from measurement to control signal.
    pub fn feedback_tf(&self) -> TransferFunction {
        self.ss.to_tf(MEASUREMENT, 0).expect("valid channel").neg()
    }
}

/// `(C_r, C_y)` with `C_ADRC = [C_r, -C_y]`.
pub fn extract_cr_cy(c: &TwoInputController) -> (TransferFunction, TransferFunction) {
    (c.reference_tf(), c.feedback_tf())
}

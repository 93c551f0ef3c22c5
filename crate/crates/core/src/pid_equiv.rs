//! PI+F and PID+F controllers equivalent to bandwidth-tuned ADRC.
//!
//! The measurement channel of the equivalent controller matches ADRC exactly.
//! The reference channel uses plain set-point weighting (`b kp + ki/s`, no
//! filter), which matches ADRC's `C_r` at both ends of the spectrum and
//! differs slightly around crossover.
//!
//! Controller structure, with `y_f` the low-pass filtered measurement:
//!
//! ```text
//! PI+F:   u = kp (b r - y_f) + ki/s (r - y_f)                y_f = y / (Tf s + 1)
//! PID+F:  u = kp (b r - y_f) + ki/s (r - y_f) - kd s y_f     y_f = y / (Tf^2 s^2 + 2 d Tf s + 1)
//! ```

use num_complex::Complex64;

use crate::adrc::{
    AdrcDesign, AdrcTuning, FirstOrderDesign, SecondOrderDesign, TwoInputController,
};
use crate::error::{require_positive, Result};
use crate::lti::{FrequencyResponseTable, Polynomial, StateSpace, TransferFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PifParams {
    pub kp: f64,
    pub ki: f64,
    /// Measurement filter time constant (s).
    pub tf: f64,
    /// Proportional set-point weight.
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidfParams {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Measurement filter time constant (s).
    pub tf: f64,
    /// Measurement filter relative damping.
    pub d: f64,
    /// Proportional set-point weight. The derivative set-point weight is zero.
    pub b: f64,
}

pub fn pif_from_adrc(design: &FirstOrderDesign) -> PifParams {
    let (ts, g, b0) = tuning_parts(design.tuning);
    let kp = (4.0 * g * g + 8.0 * g) / (b0 * ts * (2.0 * g + 1.0));
    let ki = 16.0 * g * g / (b0 * ts * ts * (2.0 * g + 1.0));
    let tf = ts / (8.0 * g + 4.0);
    let b = design.kp / (b0 * kp);
    PifParams { kp, ki, tf, b }
}

pub fn pidf_from_adrc(design: &SecondOrderDesign) -> PidfParams {
    let (ts, g, b0) = tuning_parts(design.tuning);
    let q = 3.0 * g * g + 6.0 * g + 1.0;
    let kp = (72.0 * g.powi(3) + 108.0 * g * g) / (b0 * ts * ts * q);
    let ki = 216.0 * g.powi(3) / (b0 * ts.powi(3) * q);
    let kd = (6.0 * g.powi(3) + 36.0 * g * g + 18.0 * g) / (b0 * ts * q);
    let tf = ts / (6.0 * q.sqrt());
    let d = (3.0 * g + 2.0) / (2.0 * q.sqrt());
    let b = 36.0 / (b0 * ts * ts * kp);
    PidfParams {
        kp,
        ki,
        kd,
        tf,
        d,
        b,
    }
}

fn tuning_parts(t: AdrcTuning) -> (f64, f64, f64) {
    (t.settling_time, t.observer_factor, t.b0)
}

impl PifParams {
    /// `(kp + ki/s) / (Tf s + 1)`
    pub fn feedback_tf(&self) -> TransferFunction {
        TransferFunction::new(
            Polynomial::new(vec![self.ki, self.kp]),
            Polynomial::new(vec![0.0, 1.0, self.tf]),
        )
        .expect("nonzero denominator")
    }

    /// `b kp + ki/s`
    pub fn reference_tf(&self) -> TransferFunction {
        TransferFunction::new(
            Polynomial::new(vec![self.ki, self.b * self.kp]),
            Polynomial::s(),
        )
        .expect("nonzero denominator")
    }

    /// Two-state realization with state `x = [ki ∫(r - y_f) dt, Tf y_f]`:
    ///
    /// ```text
    /// x1' = -(ki/Tf) x2 + ki r
    /// x2' = -(1/Tf) x2 + y
    /// u   = x1 - (kp/Tf) x2 + b kp r
    /// ```
    pub fn controller(&self) -> Result<TwoInputController> {
        require_positive("tf", self.tf)?;
        let PifParams { kp, ki, tf, b } = *self;
        let ss = StateSpace::from_rows(
            2,
            2,
            1,
            &[0.0, -ki / tf, 0.0, -1.0 / tf],
            &[ki, 0.0, 0.0, 1.0],
            &[1.0, -kp / tf],
            &[b * kp, 0.0],
        )?;
        TwoInputController::new(ss)
    }
}

impl PidfParams {
    /// `(kd s^2 + kp s + ki) / (s (Tf^2 s^2 + 2 d Tf s + 1))`
    pub fn feedback_tf(&self) -> TransferFunction {
        TransferFunction::new(
            Polynomial::new(vec![self.ki, self.kp, self.kd]),
            Polynomial::new(vec![0.0, 1.0, 2.0 * self.d * self.tf, self.tf * self.tf]),
        )
        .expect("nonzero denominator")
    }

    /// `b kp + ki/s`
    pub fn reference_tf(&self) -> TransferFunction {
        TransferFunction::new(
            Polynomial::new(vec![self.ki, self.b * self.kp]),
            Polynomial::s(),
        )
        .expect("nonzero denominator")
    }

    /// Three-state realization. The states are `x = [-y_f, ∫(r - y_f) dt, -y_f']`;
    /// the signs on the filter states follow from the matrices below.
    pub fn controller(&self) -> Result<TwoInputController> {
        require_positive("tf", self.tf)?;
        require_positive("d", self.d)?;
        let PidfParams {
            kp,
            ki,
            kd,
            tf,
            d,
            b,
        } = *self;
        let w2 = 1.0 / (tf * tf);
        let ss = StateSpace::from_rows(
            3,
            2,
            1,
            &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, -w2, 0.0, -2.0 * d / tf],
            &[0.0, 0.0, 1.0, 0.0, 0.0, -w2],
            &[kp, ki, kd],
            &[b * kp, 0.0],
        )?;
        TwoInputController::new(ss)
    }
}

pub fn build_pif_controller(p: &PifParams) -> Result<TwoInputController> {
    p.controller()
}

pub fn build_pidf_controller(p: &PidfParams) -> Result<TwoInputController> {
    p.controller()
}

/// Equivalent parameters for either order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquivalentParams {
    Pif(PifParams),
    Pidf(PidfParams),
}

impl EquivalentParams {
    pub fn from_design(design: &AdrcDesign) -> Self {
        match design {
            AdrcDesign::FirstOrder(d) => Self::Pif(pif_from_adrc(d)),
            AdrcDesign::SecondOrder(d) => Self::Pidf(pidf_from_adrc(d)),
        }
    }

    pub fn controller(&self) -> Result<TwoInputController> {
        match self {
            Self::Pif(p) => p.controller(),
            Self::Pidf(p) => p.controller(),
        }
    }

    pub fn feedback_tf(&self) -> TransferFunction {
        match self {
            Self::Pif(p) => p.feedback_tf(),
            Self::Pidf(p) => p.feedback_tf(),
        }
    }

    pub fn reference_tf(&self) -> TransferFunction {
        match self {
            Self::Pif(p) => p.reference_tf(),
            Self::Pidf(p) => p.reference_tf(),
        }
    }

    pub fn kp(&self) -> f64 {
        match self {
            Self::Pif(p) => p.kp,
            Self::Pidf(p) => p.kp,
        }
    }

    pub fn b(&self) -> f64 {
        match self {
            Self::Pif(p) => p.b,
            Self::Pidf(p) => p.b,
        }
    }
}

/// A conventional 2DOF PID used for side-by-side comparisons:
///
/// ```text
/// u = kp (b r - y) + ki/s (r - y) - kd s / (Tf s + 1) y
/// ```
///
/// No measurement filter on the P and I terms. With `kd = 0` the derivative
/// term and its filter state are dropped and `tf` is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDofPid {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Derivative filter time constant (s).
    pub tf: f64,
    pub b: f64,
}

impl TwoDofPid {
    pub fn feedback_tf(&self) -> TransferFunction {
        let pi = TransferFunction::new(Polynomial::new(vec![self.ki, self.kp]), Polynomial::s())
            .expect("nonzero denominator");
        if self.kd == 0.0 {
            return pi;
        }
        let deriv = TransferFunction::new(
            Polynomial::new(vec![0.0, self.kd]),
            Polynomial::new(vec![1.0, self.tf]),
        )
        .expect("nonzero denominator");
        pi.add(&deriv)
    }

    pub fn reference_tf(&self) -> TransferFunction {
        TransferFunction::new(
            Polynomial::new(vec![self.ki, self.b * self.kp]),
            Polynomial::s(),
        )
        .expect("nonzero denominator")
    }

    /// State `x = [∫(r - y) dt, y / (Tf s + 1)]`, the second only when `kd != 0`.
    pub fn controller(&self) -> Result<TwoInputController> {
        let TwoDofPid { kp, ki, kd, tf, b } = *self;
        for (name, v) in [("kp", kp), ("ki", ki), ("kd", kd), ("b", b)] {
            if !v.is_finite() {
                return Err(crate::Error::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                });
            }
        }
        let ss = if kd == 0.0 {
            StateSpace::from_rows(1, 2, 1, &[0.0], &[1.0, -1.0], &[ki], &[b * kp, -kp])?
        } else {
            require_positive("tf", tf)?;
            StateSpace::from_rows(
                2,
                2,
                1,
                &[0.0, 0.0, 0.0, -1.0 / tf],
                &[1.0, -1.0, 0.0, 1.0 / tf],
                &[ki, kd / tf],
                &[b * kp, -kp - kd / tf],
            )?
        };
        TwoInputController::new(ss)
    }
}

pub const ASYMPTOTE_LOW_OMEGA: f64 = 1e-6;
pub const ASYMPTOTE_HIGH_OMEGA: f64 = 1e6;
pub const ASYMPTOTE_RTOL: f64 = 1e-4;

/// One numerically evaluated limit: ADRC value, equivalent-controller value,
/// and their relative mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitPair {
    pub adrc: Complex64,
    pub equivalent: Complex64,
    pub mismatch: f64,
}

impl LimitPair {
    fn new(adrc: Complex64, equivalent: Complex64) -> Self {
        Self {
            adrc,
            equivalent,
            mismatch: (adrc - equivalent).norm() / equivalent.norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteReport {
    /// `s C_r(s)` against `s K_ry(s)` at `ω = 1e-6`; both tend to `ki`.
    pub low: LimitPair,
    /// `C_r(s)` against `K_ry(s)` at `ω = 1e6`; both tend to `b kp`.
    pub high: LimitPair,
}

impl AsymptoteReport {
    pub fn passes(&self) -> bool {
        self.low.mismatch < ASYMPTOTE_RTOL && self.high.mismatch < ASYMPTOTE_RTOL
    }
}

/// Compares the reference channels of the ADRC and equivalent controllers at
/// very low and very high frequency.
pub fn verify_asymptotes(
    adrc: &TwoInputController,
    equivalent: &TwoInputController,
) -> AsymptoteReport {
    let cr = adrc.reference_tf();
    let kr = equivalent.reference_tf();
    let lo = Complex64::new(0.0, ASYMPTOTE_LOW_OMEGA);
    let hi = Complex64::new(0.0, ASYMPTOTE_HIGH_OMEGA);
    AsymptoteReport {
        low: LimitPair::new(lo * cr.eval(lo), lo * kr.eval(lo)),
        high: LimitPair::new(cr.eval(hi), kr.eval(hi)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceGap {
    /// `max |C_r - K_r| / |C_r|` over the grid.
    pub sup: f64,
    pub omega_at_sup: f64,
    /// Channels `C_r`, `K_r` and `gap` (real, stored as complex).
    pub table: FrequencyResponseTable,
}

/// Relative difference between the ADRC reference channel and the set-point
/// weighted approximation, over a frequency grid.
pub fn reference_channel_gap(
    adrc: &TwoInputController,
    equivalent: &TwoInputController,
    omega: &[f64],
) -> Result<ReferenceGap> {
    let cr = adrc.reference_tf().freq_response(omega);
    let kr = equivalent.reference_tf().freq_response(omega);
    let gap: Vec<f64> = cr
        .iter()
        .zip(&kr)
        .map(|(a, b)| (a - b).norm() / a.norm())
        .collect();
    let (idx, sup) =
        gap.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, g)| {
                if g > best.1 {
                    (i, g)
                } else {
                    best
                }
            });
    let mut table = FrequencyResponseTable::new(omega.to_vec())?;
    table.push("C_r", cr)?;
    table.push("K_r", kr)?;
    table.push("gap", gap.iter().map(|&g| Complex64::new(g, 0.0)).collect())?;
    Ok(ReferenceGap {
        sup,
        omega_at_sup: omega[idx],
        table,
    })
}

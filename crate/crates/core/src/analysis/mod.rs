//! Closed-loop assembly and the experiment suite built on it.

mod gang;
mod margins;
mod plant;
mod sweep;

pub use gang::{gang_of_seven, GangOfSeven, GANG_MINREAL_TOL};
pub use margins::{loop_measures, LoopMeasures};
pub use plant::PlantModel;
pub use sweep::{
    final_output, step_sweep, NamedController, SweepCase, SweepParameter, SweepResult, UNSTABLE_CAP,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::adrc::{TwoInputController, MEASUREMENT, REFERENCE};
use crate::error::{Error, Result};
use crate::lti::{unwrapped_phase_deg, FrequencyResponseTable, StateSpace, TransferFunction};

/// Closed-loop input indices.
pub const CL_REFERENCE: usize = 0;
pub const CL_INPUT_DISTURBANCE: usize = 1;
pub const CL_MEASUREMENT_NOISE: usize = 2;
/// Closed-loop output indices.
pub const CL_OUTPUT: usize = 0;
pub const CL_CONTROL: usize = 1;

/// Feedback interconnection of a SISO plant and a two-input controller.
///
/// Inputs `[r, d_u, n]`, outputs `[y, u]`. The plant sees `u + d_u`, the
/// controller's measurement input sees `y + n`. State is `[x_plant; x_ctrl]`.
pub fn closed_loop(plant: &StateSpace, controller: &TwoInputController) -> Result<StateSpace> {
    if plant.n_inputs() != 1 || plant.n_outputs() != 1 {
        return Err(Error::Dimension("plant must be SISO".into()));
    }
    let c = controller.state_space();
    let dr = c.d()[(0, REFERENCE)];
    let dy = c.d()[(0, MEASUREMENT)];
    if plant.d()[(0, 0)] != 0.0 && dy != 0.0 {
        return Err(Error::AlgebraicLoop);
    }
    let (np, nc) = (plant.n_states(), c.n_states());
    let n = np + nc;
    let (ap, bp, cp) = (plant.a(), plant.b(), plant.c());
    let dp = plant.d()[(0, 0)];
    let (ac, bc, cc) = (c.a(), c.b(), c.c());
    let bcr = bc.column(REFERENCE);
    let bcy = bc.column(MEASUREMENT);

    // y = Cp xp + Dp (u + d_u), u = Cc xc + Dr r + Dy (y + n); with Dp Dy = 0
    // the substitution closes without solving a loop equation.
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, 3);
    let mut cm = DMatrix::zeros(2, n);
    let mut d = DMatrix::zeros(2, 3);

    // u row, as coefficients over [xp, xc] and [r, d_u, n]
    let mut u_x = DMatrix::<f64>::zeros(1, n);
    u_x.view_mut((0, 0), (1, np)).copy_from(&(cp * dy));
    u_x.view_mut((0, np), (1, nc)).copy_from(cc);
    // Dp is nonzero only when Dy is zero, so u has no d_u term.
    let u_in = [dr, 0.0, dy];

    // y row
    let mut y_x = DMatrix::<f64>::zeros(1, n);
    y_x.view_mut((0, 0), (1, np)).copy_from(cp);
    y_x.view_mut((0, np), (1, nc)).copy_from(&(cc * dp));
    let y_in = [dp * dr, dp, dp * dy];

    // xp' = Ap xp + Bp (u + d_u)
    a.view_mut((0, 0), (np, np)).copy_from(ap);
    for i in 0..np {
        for j in 0..n {
            a[(i, j)] += bp[(i, 0)] * u_x[(0, j)];
        }
        for k in 0..3 {
            b[(i, k)] = bp[(i, 0)] * (u_in[k] + if k == CL_INPUT_DISTURBANCE { 1.0 } else { 0.0 });
        }
    }
    // xc' = Ac xc + Bcr r + Bcy (y + n)
    a.view_mut((np, np), (nc, nc)).copy_from(ac);
    for i in 0..nc {
        for j in 0..n {
            a[(np + i, j)] += bcy[i] * y_x[(0, j)];
        }
        b[(np + i, CL_REFERENCE)] = bcr[i] + bcy[i] * y_in[0];
        b[(np + i, CL_INPUT_DISTURBANCE)] = bcy[i] * y_in[1];
        b[(np + i, CL_MEASUREMENT_NOISE)] = bcy[i] * (y_in[2] + 1.0);
    }
    cm.row_mut(CL_OUTPUT).copy_from(&y_x);
    cm.row_mut(CL_CONTROL).copy_from(&u_x);
    for k in 0..3 {
        d[(CL_OUTPUT, k)] = y_in[k];
        d[(CL_CONTROL, k)] = u_in[k];
    }
    StateSpace::new(a, b, cm, d)?.with_labels(["r", "d_u", "n"], ["y", "u"])
}

/// Magnitude and unwrapped phase of several transfer functions.
#[derive(Debug, Clone, PartialEq)]
pub struct BodeData {
    pub table: FrequencyResponseTable,
    pub magnitude: Vec<Vec<f64>>,
    pub phase_deg: Vec<Vec<f64>>,
}

impl BodeData {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.table.channels.iter().map(|(n, _)| n.as_str())
    }
}

pub fn bode_set(tfs: &[(String, TransferFunction)], omega: &[f64]) -> Result<BodeData> {
    let mut table = FrequencyResponseTable::new(omega.to_vec())?;
    let mut magnitude = Vec::with_capacity(tfs.len());
    let mut phase_deg = Vec::with_capacity(tfs.len());
    for (name, tf) in tfs {
        let values: Vec<Complex64> = tf.freq_response(omega);
        magnitude.push(values.iter().map(|v| v.norm()).collect());
        phase_deg.push(unwrapped_phase_deg(&values));
        table.push(name.clone(), values)?;
    }
    Ok(BodeData {
        table,
        magnitude,
        phase_deg,
    })
}

/// Largest relative difference `|a - b| / |b|` over paired samples.
pub fn max_relative_difference(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm())
        .fold(0.0, f64::max)
}

/// Largest relative difference between magnitudes.
pub fn max_relative_magnitude_difference(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.norm() - y.norm()).abs() / y.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adrc::tune_first_order;
    use crate::pid_equiv::pif_from_adrc;

    fn nominal() -> (StateSpace, TwoInputController) {
        let plant = PlantModel::first_order(1.0, 1.0).unwrap().state_space();
        (
            plant,
            tune_first_order(1.0, 10.0, 1.0).unwrap().controller(),
        )
    }

    #[test]
    fn closed_loop_shape_and_stability() {
        let (p, c) = nominal();
        let cl = closed_loop(&p, &c).unwrap();
        assert_eq!((cl.n_states(), cl.n_inputs(), cl.n_outputs()), (3, 3, 2));
        assert!(cl.is_stable().unwrap());
    }

    #[test]
    fn closed_loop_dc_gains() {
        let (p, c) = nominal();
        let cl = closed_loop(&p, &c).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let ry = cl.eval(zero, CL_REFERENCE, CL_OUTPUT).unwrap();
        assert!((ry - 1.0).norm() < 1e-12);
        let dy = cl.eval(zero, CL_INPUT_DISTURBANCE, CL_OUTPUT).unwrap();
        assert!(dy.norm() < 1e-12);
    }

    #[test]
    fn closed_loop_matches_transfer_function_algebra() {
        let (p, c) = nominal();
        let cl = closed_loop(&p, &c).unwrap();
        let ptf = p.to_tf(0, 0).unwrap();
        let (cr, cy) = (c.reference_tf(), c.feedback_tf());
        let s_fn = ptf.mul(&cy).feedback_unity().unwrap();
        for &w in &[0.1, 1.0, 10.0, 300.0] {
            let s = Complex64::new(0.0, w);
            let l = ptf.eval(s) * cy.eval(s);
            let sens = 1.0 / (1.0 + l);
            let want_ry = ptf.eval(s) * cr.eval(s) * sens;
            let got = cl.eval(s, CL_REFERENCE, CL_OUTPUT).unwrap();
            assert!((got - want_ry).norm() < 1e-10 * want_ry.norm());
            let want_nu = -cy.eval(s) * sens;
            let got = cl.eval(s, CL_MEASUREMENT_NOISE, CL_CONTROL).unwrap();
            assert!((got - want_nu).norm() < 1e-10 * want_nu.norm());
            let want_t = s_fn.eval(s);
            assert!((want_t - l * sens).norm() < 1e-10);
        }
    }

    #[test]
    fn algebraic_loop_is_rejected() {
        let plant = StateSpace::from_rows(1, 1, 1, &[-1.0], &[1.0], &[1.0], &[1.0]).unwrap();
        let pid = crate::pid_equiv::TwoDofPid {
            kp: 1.0,
            ki: 1.0,
            kd: 0.0,
            tf: 0.0,
            b: 1.0,
        };
        assert_eq!(
            closed_loop(&plant, &pid.controller().unwrap()),
            Err(Error::AlgebraicLoop)
        );
        // Feedthrough in the plant is fine when the controller has none on y.
        let c = tune_first_order(1.0, 10.0, 1.0).unwrap().controller();
        assert!(closed_loop(&plant, &c).is_ok());
    }

    #[test]
    fn plant_feedthrough_is_wired_through() {
        let plant = StateSpace::from_rows(1, 1, 1, &[-2.0], &[1.0], &[1.0], &[0.5]).unwrap();
        let d = tune_first_order(1.0, 10.0, 1.0).unwrap();
        let c = d.controller();
        let cl = closed_loop(&plant, &c).unwrap();
        let ptf = plant.to_tf(0, 0).unwrap();
        let (cr, cy) = (c.reference_tf(), c.feedback_tf());
        for &w in &[0.3, 3.0, 30.0] {
            let s = Complex64::new(0.0, w);
            let sens = 1.0 / (1.0 + ptf.eval(s) * cy.eval(s));
            let want = ptf.eval(s) * cr.eval(s) * sens;
            let got = cl.eval(s, CL_REFERENCE, CL_OUTPUT).unwrap();
            assert!((got - want).norm() < 1e-10 * want.norm());
            let want_d = ptf.eval(s) * sens;
            let got_d = cl.eval(s, CL_INPUT_DISTURBANCE, CL_OUTPUT).unwrap();
            assert!((got_d - want_d).norm() < 1e-10 * want_d.norm());
        }
    }

    #[test]
    fn bode_of_adrc_feedback_channel() {
        let d = tune_first_order(1.0, 10.0, 1.0).unwrap();
        let c = d.controller();
        let eq = pif_from_adrc(&d).controller().unwrap();
        let omega = crate::lti::default_grid();
        let bode = bode_set(
            &[
                ("adrc".into(), c.feedback_tf()),
                ("pif".into(), eq.feedback_tf()),
            ],
            &omega,
        )
        .unwrap();
        let mag = &bode.magnitude[0];
        let n = omega.len();
        let slope =
            |i: usize, j: usize| 20.0 * (mag[j] / mag[i]).log10() / (omega[j] / omega[i]).log10();
        assert!((slope(0, 10) + 20.0).abs() < 0.1);
        assert!((slope(n - 11, n - 1) + 20.0).abs() < 0.5);
        let at = |w: f64| c.feedback_tf().eval(Complex64::new(0.0, w)).norm();
        assert!(at(1e4) < at(1e2));
        let diff = max_relative_difference(
            bode.table.channel("adrc").unwrap(),
            bode.table.channel("pif").unwrap(),
        );
        assert!(diff < 1e-8, "{diff}");
        // integrator: -90 deg at the low end, filter adds another -90 at the top
        assert!((bode.phase_deg[0][0] + 90.0).abs() < 1.0);
        assert!((bode.phase_deg[0][n - 1] + 90.0).abs() < 1.0);
    }
}

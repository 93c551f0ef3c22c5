//! Text reports: the tuning conversion and the verification checklist.

use std::fmt;

use adrc_pid::adrc::tune_second_order;
use adrc_pid::adrc::{AdrcDesign, AdrcTuning};
use adrc_pid::analysis::{
    closed_loop, gang_of_seven, loop_measures, max_relative_magnitude_difference, CL_OUTPUT,
    CL_REFERENCE,
};
use adrc_pid::lti::{char_poly, coefficient_mismatch, log_grid, Polynomial, TransferFunction};
use adrc_pid::pid_equiv::{pidf_from_adrc, verify_asymptotes, EquivalentParams};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::figures::{equivalent_name, plant};
use crate::output::fmt_sig;
use crate::CliError;

const DIGITS: usize = 10;

fn sig(x: f64) -> String {
    fmt_sig(x, DIGITS)
}

fn matrix(name: &str, m: &DMatrix<f64>) -> String {
    let mut s = format!("{name} =\n");
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| sig(m[(r, c)])).collect();
        s.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    s
}

/// Gains of the ADRC design, its equivalent PI(D)F and the state-space
/// realization of the latter.
pub fn tune_report(order: u8, ts: f64, g: f64, b0: f64) -> Result<String, CliError> {
    let design = AdrcDesign::tune(order, AdrcTuning::new(ts, g, b0)?)?;
    let eq = EquivalentParams::from_design(&design);
    let mut s = format!(
        "order {order} ADRC tuning: ts={} g={} b0={}\n",
        sig(ts),
        sig(g),
        sig(b0)
    );
    s.push_str("adrc:\n");
    match design {
        AdrcDesign::FirstOrder(d) => {
            s.push_str(&format!("  K_P={}\n", sig(d.kp)));
            for (i, l) in d.observer_gains.iter().enumerate() {
                s.push_str(&format!("  l{}={}\n", i + 1, sig(*l)));
            }
        }
        AdrcDesign::SecondOrder(d) => {
            s.push_str(&format!(
                "  omega={}\n  K_P={}\n  K_D={}\n",
                sig(d.bandwidth),
                sig(d.kp),
                sig(d.kd)
            ));
            for (i, l) in d.observer_gains.iter().enumerate() {
                s.push_str(&format!("  l{}={}\n", i + 1, sig(*l)));
            }
        }
    }
    s.push_str(&format!("{}:\n", equivalent_name(order)));
    match eq {
        EquivalentParams::Pif(p) => {
            s.push_str(&format!(
                "  kp={}\n  ki={}\n  Tf={}\n  b={}\n",
                sig(p.kp),
                sig(p.ki),
                sig(p.tf),
                sig(p.b)
            ));
        }
        EquivalentParams::Pidf(p) => {
            s.push_str(&format!(
                "  kp={}\n  ki={}\n  kd={}\n  Tf={}\n  d={}\n  b={}\n",
                sig(p.kp),
                sig(p.ki),
                sig(p.kd),
                sig(p.tf),
                sig(p.d),
                sig(p.b)
            ));
        }
    }
    let c = eq.controller()?;
    let ss = c.state_space();
    s.push_str("realization (inputs r, y; output u):\n");
    s.push_str(&matrix("A", ss.a()));
    s.push_str(&matrix("B", ss.b()));
    s.push_str(&matrix("C", ss.c()));
    s.push_str(&matrix("D", ss.d()));
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: residual={:.3e} tolerance={:.0e} {}",
            self.name,
            self.residual,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn order_checks(cfg: &ExperimentConfig, order: u8) -> Result<Vec<Check>, CliError> {
    let t = &cfg.tuning;
    let design = AdrcDesign::tune(order, AdrcTuning::new(t.ts, t.g, t.b0)?)?;
    let adrc = design.controller();
    let eq = EquivalentParams::from_design(&design);
    let eq_ctrl = eq.controller()?;
    let mut out = Vec::new();

    // y-channel equivalence, with the optional b0 error on the PI(D)F side
    let perturbed = AdrcDesign::tune(
        order,
        AdrcTuning::new(t.ts, t.g, t.b0 * (1.0 + cfg.verify.b0_perturbation))?,
    )?;
    let peq = EquivalentParams::from_design(&perturbed);
    out.push(Check::new(
        format!("cy_equivalence_order{order}"),
        adrc.feedback_tf().coefficient_mismatch(&peq.feedback_tf()),
        1e-9,
    ));

    if let AdrcDesign::FirstOrder(d) = design {
        let [l1, l2] = d.observer_gains;
        let (kp, b0) = (d.kp, t.b0);
        let closed = TransferFunction::new(
            Polynomial::new(vec![kp * l2 / b0, kp * l1 / b0, kp / b0]),
            Polynomial::new(vec![0.0, l1 + kp, 1.0]),
        )?;
        out.push(Check::new(
            "cr_closed_form_order1",
            adrc.reference_tf().coefficient_mismatch(&closed),
            1e-9,
        ));
    }

    let realization = eq_ctrl
        .feedback_tf()
        .coefficient_mismatch(&eq.feedback_tf())
        .max(
            eq_ctrl
                .reference_tf()
                .equivalence_mismatch(&eq.reference_tf()),
        );
    out.push(Check::new(
        format!("realization_order{order}"),
        realization,
        1e-9,
    ));

    let asym = verify_asymptotes(&adrc, &eq_ctrl);
    out.push(Check::new(
        format!("asymptote_low_order{order}"),
        asym.low.mismatch,
        1e-4,
    ));
    out.push(Check::new(
        format!("asymptote_high_order{order}"),
        asym.high.mismatch,
        1e-4,
    ));

    let p = plant(cfg, order)?;
    let ga = gang_of_seven(&p, &adrc)?;
    let ge = gang_of_seven(&p, &eq_ctrl)?;
    let omega = log_grid(1e-2, 1e3, 300)?;
    let g4 = ga
        .gang_of_four()
        .iter()
        .zip(ge.gang_of_four())
        .map(|(a, e)| {
            max_relative_magnitude_difference(&a.freq_response(&omega), &e.freq_response(&omega))
        })
        .fold(0.0, f64::max);
    out.push(Check::new(format!("gang_of_four_order{order}"), g4, 1e-8));
    out.push(Check::new(
        format!("sensitivity_identity_order{order}"),
        ga.sensitivity_identity_residual()
            .max(ge.sensitivity_identity_residual()),
        1e-9,
    ));

    let la = loop_measures(&p.tf().mul(&adrc.feedback_tf()));
    let le = loop_measures(&p.tf().mul(&eq_ctrl.feedback_tf()));
    let lm = [
        (la.gain_margin, le.gain_margin),
        (la.phase_margin_deg, le.phase_margin_deg),
        (la.ms, le.ms),
    ]
    .iter()
    .map(|&(a, b)| {
        if a.is_infinite() && b == a {
            0.0
        } else {
            rel(a, b)
        }
    })
    .fold(0.0, f64::max);
    out.push(Check::new(format!("loop_measures_order{order}"), lm, 1e-6));

    let want = if order == 1 {
        4.0 / t.ts
    } else {
        36.0 / (t.ts * t.ts)
    };
    out.push(Check::new(
        format!("set_point_weight_order{order}"),
        rel(eq.b() * eq.kp() * t.b0, want),
        1e-12,
    ));

    let obs_pole = match design {
        AdrcDesign::FirstOrder(d) => t.g * d.kp,
        AdrcDesign::SecondOrder(d) => t.g * d.bandwidth,
    };
    let n = order as usize + 1;
    let target = (0..n).fold(Polynomial::one(), |acc, _| {
        acc * Polynomial::new(vec![obs_pole, 1.0])
    });
    out.push(Check::new(
        format!("observer_poles_order{order}"),
        coefficient_mismatch(&char_poly(&design.observer_matrix()), &target),
        1e-12,
    ));

    for (name, ctrl) in [("adrc", &adrc), (equivalent_name(order), &eq_ctrl)] {
        let cl = closed_loop(&p.state_space(), ctrl)?;
        let residual = if cl.is_stable()? {
            let dc = cl.eval(Complex64::new(0.0, 0.0), CL_REFERENCE, CL_OUTPUT)?;
            (dc - 1.0).norm()
        } else {
            f64::INFINITY
        };
        out.push(Check::new(
            format!("closed_loop_dc_{name}_order{order}"),
            residual,
            1e-9,
        ));
    }
    Ok(out)
}

/// Every check at the configured tuning, both orders.
pub fn verify_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = order_checks(cfg, 1)?;
    checks.extend(order_checks(cfg, 2)?);

    let lo = 5.0 / (2.0 * 10f64.sqrt());
    let dmin = log_grid(0.1, 100.0, 2001)?
        .into_iter()
        .map(|g| tune_second_order(1.0, g, 1.0).map(|d| pidf_from_adrc(&d).d))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::new("filter_damping_min", (dmin - lo).abs(), 1e-3));
    Ok(checks)
}

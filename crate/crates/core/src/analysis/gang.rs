use num_complex::Complex64;

use crate::adrc::TwoInputController;
use crate::error::Result;
use crate::lti::{Polynomial, TransferFunction};

use super::PlantModel;

/// Cancellation tolerance applied to every gang-of-seven member.
pub const GANG_MINREAL_TOL: f64 = 1e-8;

/// Feedback-only closed-loop functions plus the reference-weighted set.
///
/// With `F = C_r / C_y` the reference-weighted functions are `S F`, `P S F`
/// and `T F = P C_r / (1 + P C_y)`; they are formed from `C_r` directly.
#[derive(Debug, Clone, PartialEq)]
pub struct GangOfSeven {
    pub s: TransferFunction,
    pub ps: TransferFunction,
    pub cs: TransferFunction,
    pub t: TransferFunction,
    pub sf_r: TransferFunction,
    pub psf_r: TransferFunction,
    pub tf_r: TransferFunction,
}

impl GangOfSeven {
    pub const NAMES: [&'static str; 7] = ["S", "PS", "CS", "T", "SF_r", "PSF_r", "TF_r"];

    pub fn members(&self) -> [&TransferFunction; 7] {
        [
            &self.s,
            &self.ps,
            &self.cs,
            &self.t,
            &self.sf_r,
            &self.psf_r,
            &self.tf_r,
        ]
    }

    /// `[S, PS, CS, T]`
    pub fn gang_of_four(&self) -> [&TransferFunction; 4] {
        [&self.s, &self.ps, &self.cs, &self.t]
    }

    pub fn freq_response(&self, omega: &[f64]) -> Vec<Vec<Complex64>> {
        self.members()
            .iter()
            .map(|g| g.freq_response(omega))
            .collect()
    }

    /// Coefficient residual of `S + T - 1`, relative to the common scale.
    pub fn sensitivity_identity_residual(&self) -> f64 {
        let lhs = &(self.s.num() * self.t.den()) + &(self.t.num() * self.s.den());
        let rhs = self.s.den() * self.t.den();
        let scale = rhs.norm_inf();
        let diff = &lhs - &rhs;
        diff.norm_inf() / scale
    }
}

pub fn gang_of_seven(plant: &PlantModel, controller: &TwoInputController) -> Result<GangOfSeven> {
    let p = plant.tf();
    let cy = controller.feedback_tf();
    let cr = controller.reference_tf();
    let (pn, pd) = (p.num(), p.den());
    let (cn, cd) = (cy.num(), cy.den());
    let char_poly = &(pd * cd) + &(pn * cn);

    let make = |num: Polynomial, den: Polynomial| -> Result<TransferFunction> {
        TransferFunction::new(num, den)?.minreal(GANG_MINREAL_TOL)
    };

    let s = make(pd * cd, char_poly.clone())?;
    let ps = make(pn * cd, char_poly.clone())?;
    let cs = make(cn * pd, char_poly.clone())?;
    let t = make(pn * cn, char_poly.clone())?;

    // F = C_r / C_y = (cr.num * cd) / (cr.den * cn)
    let f_num = cr.num() * cd;
    let f_den = cr.den() * cn;
    let sf_r = make(&(pd * cd) * &f_num, &char_poly * &f_den)?;
    let psf_r = make(&(pn * cd) * &f_num, &char_poly * &f_den)?;
    let tf_r = make(&(pn * cr.num()) * cd, &char_poly * cr.den())?;

    Ok(GangOfSeven {
        s,
        ps,
        cs,
        t,
        sf_r,
        psf_r,
        tf_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adrc::tune_first_order;
    use crate::lti::StateSpace;

    #[test]
    fn unity_controller_on_lag() {
        let plant = PlantModel::first_order(1.0, 1.0).unwrap();
        // C_r = C_y = 1 as a static two-input controller
        let ss = StateSpace::new(
            nalgebra::DMatrix::zeros(0, 0),
            nalgebra::DMatrix::zeros(0, 2),
            nalgebra::DMatrix::zeros(1, 0),
            nalgebra::DMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
        )
        .unwrap();
        let c = TwoInputController::new(ss).unwrap();
        let g = gang_of_seven(&plant, &c).unwrap();
        let want = TransferFunction::from_coeffs(&[1.0, 1.0], &[2.0, 1.0]).unwrap();
        assert!(g.s.coefficient_mismatch(&want) < 1e-12, "{}", g.s);
        assert!(g.sensitivity_identity_residual() < 1e-12);
        // F = 1, so the weighted functions coincide with the plain ones
        assert!(g.sf_r.equivalence_mismatch(&g.s) < 1e-12);
        assert!(g.tf_r.equivalence_mismatch(&g.t) < 1e-12);
    }

    #[test]
    fn identity_for_nominal_adrc() {
        let plant = PlantModel::first_order(1.0, 1.0).unwrap();
        let c = tune_first_order(1.0, 10.0, 1.0).unwrap().controller();
        let g = gang_of_seven(&plant, &c).unwrap();
        assert!(g.sensitivity_identity_residual() < 1e-9);
        for m in g.members() {
            assert!(m.is_stable().unwrap(), "{m}");
        }
    }

    #[test]
    fn weighted_members_match_pointwise_formulas() {
        let plant = PlantModel::first_order(1.0, 1.0).unwrap();
        let c = tune_first_order(1.0, 10.0, 1.0).unwrap().controller();
        let g = gang_of_seven(&plant, &c).unwrap();
        let (p, cr, cy) = (plant.tf(), c.reference_tf(), c.feedback_tf());
        for w in [0.05, 0.7, 9.0, 120.0] {
            let s = Complex64::new(0.0, w);
            let (pv, crv, cyv) = (p.eval(s), cr.eval(s), cy.eval(s));
            let sens = 1.0 / (1.0 + pv * cyv);
            let f = crv / cyv;
            let close = |got: Complex64, want: Complex64| (got - want).norm() <= 1e-9 * want.norm();
            assert!(close(g.s.eval(s), sens));
            assert!(close(g.ps.eval(s), pv * sens));
            assert!(close(g.cs.eval(s), cyv * sens));
            assert!(close(g.t.eval(s), pv * cyv * sens));
            assert!(close(g.sf_r.eval(s), sens * f));
            assert!(close(g.psf_r.eval(s), pv * sens * f));
            assert!(close(g.tf_r.eval(s), pv * crv * sens));
        }
    }
}

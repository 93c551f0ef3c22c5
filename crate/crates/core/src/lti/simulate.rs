use nalgebra::{DMatrix, DVector};

use super::state_space::StateSpace;
use crate::error::{Error, Result};

/// Sampled time-domain traces on a uniform grid starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResponseTable {
    pub t: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl StepResponseTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn step_size(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }
}

/// Zero-order-hold discretization `(Phi, Gamma)` for one input column,
/// taken from the exponential of the augmented matrix `[[A, b], [0, 0]] h`.
pub fn zoh_discretize(model: &StateSpace, input: usize, h: f64) -> (DMatrix<f64>, DVector<f64>) {
    let n = model.n_states();
    let mut aug = DMatrix::<f64>::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(model.a());
    aug.view_mut((0, n), (n, 1))
        .copy_from(&model.b().column(input));
    let e = (aug * h).exp();
    let phi = e.view((0, 0), (n, n)).into_owned();
    let gamma = e.view((0, n), (n, 1)).column(0).into_owned();
    (phi, gamma)
}

/// State reached at time `t` under a unit step on `input`, from rest.
/// Evaluated in one shot, not by stepping.
pub fn step_state_at(model: &StateSpace, input: usize, t: f64) -> Result<DVector<f64>> {
    if input >= model.n_inputs() {
        return Err(Error::Index {
            kind: "input",
            index: input,
            len: model.n_inputs(),
        });
    }
    Ok(zoh_discretize(model, input, t).1)
}

/// Unit step on `input` from zero initial state, sampled at
/// `h = t_end / n_steps`. Exact at the sample instants because the input is
/// piecewise constant.
pub fn step_response(
    model: &StateSpace,
    input: usize,
    t_end: f64,
    n_steps: usize,
) -> Result<StepResponseTable> {
    if input >= model.n_inputs() {
        return Err(Error::Index {
            kind: "input",
            index: input,
            len: model.n_inputs(),
        });
    }
    if n_steps < 2 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            reason: "must be >= 2".into(),
        });
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: "must be > 0".into(),
        });
    }
    let h = t_end / n_steps as f64;
    let (phi, gamma) = zoh_discretize(model, input, h);
    let c = model.c();
    let d = model.d().column(input).into_owned();

    let p = model.n_outputs();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n_steps + 1); p];
    let mut x = DVector::<f64>::zeros(model.n_states());
    for k in 0..=n_steps {
        let y = c * &x + &d;
        for (col, v) in columns.iter_mut().zip(y.iter()) {
            col.push(*v);
        }
        if k < n_steps {
            x = &phi * &x + &gamma;
        }
    }
    let t = (0..=n_steps).map(|k| k as f64 * h).collect();
    Ok(StepResponseTable {
        t,
        columns: model.output_labels().iter().cloned().zip(columns).collect(),
    })
}

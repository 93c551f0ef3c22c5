use rayon::prelude::*;

use crate::adrc::TwoInputController;
use crate::error::{Error, Result};
use crate::lti::{step_response, step_state_at, StepResponseTable};

use super::{closed_loop, PlantModel, CL_OUTPUT, CL_REFERENCE};

/// Magnitude cap applied to traces of unstable closed loops.
pub const UNSTABLE_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Gain,
    TimeConstant,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gain => "K",
            Self::TimeConstant => "T",
        }
    }

    fn apply(&self, plant: PlantModel, value: f64) -> Result<PlantModel> {
        match self {
            Self::Gain => plant.with_gain(value),
            Self::TimeConstant => plant.with_time_constant(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedController {
    pub name: String,
    pub controller: TwoInputController,
}

impl NamedController {
    pub fn new(name: impl Into<String>, controller: TwoInputController) -> Self {
        Self {
            name: name.into(),
            controller,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCase {
    pub value: f64,
    pub controller: String,
    pub stable: bool,
    /// Columns `y` and `u`. Unstable traces are clamped to `±UNSTABLE_CAP`.
    pub response: StepResponseTable,
    /// Steady-state reference-to-output gain (`NaN` when unstable).
    pub final_value: f64,
}

impl SweepCase {
    pub fn output(&self) -> &[f64] {
        self.response.column("y").expect("closed loop has y")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub controllers: Vec<String>,
    /// Value-major: `cases[i * controllers.len() + j]`.
    pub cases: Vec<SweepCase>,
}

impl SweepResult {
    pub fn case(&self, value_index: usize, controller_index: usize) -> &SweepCase {
        &self.cases[value_index * self.controllers.len() + controller_index]
    }

    /// `sup_t |y_a(t) - y_b(t)|` for one swept value.
    pub fn trace_gap(&self, value_index: usize, a: usize, b: usize) -> f64 {
        let ya = self.case(value_index, a).output();
        let yb = self.case(value_index, b).output();
        ya.iter()
            .zip(yb)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Reference step responses of `plant` with one parameter swept, each
/// controller used as-is (no retuning).
pub fn step_sweep(
    plant: &PlantModel,
    parameter: SweepParameter,
    values: &[f64],
    controllers: &[NamedController],
    t_end: f64,
    n_steps: usize,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::InvalidParameter {
            name: "values",
            reason: "must not be empty".into(),
        });
    }
    if controllers.is_empty() {
        return Err(Error::InvalidParameter {
            name: "controllers",
            reason: "must not be empty".into(),
        });
    }
    let jobs: Vec<(f64, &NamedController)> = values
        .iter()
        .flat_map(|&v| controllers.iter().map(move |c| (v, c)))
        .collect();
    let cases = jobs
        .par_iter()
        .map(|&(value, named)| -> Result<SweepCase> {
            let p = parameter.apply(*plant, value)?;
            let cl = closed_loop(&p.state_space(), &named.controller)?;
            let stable = cl.is_stable()?;
            let mut response = step_response(&cl, CL_REFERENCE, t_end, n_steps)?;
            if !stable {
                for (_, col) in response.columns.iter_mut() {
                    cap_trace(col, UNSTABLE_CAP);
                }
            }
            let final_value = if stable {
                cl.eval(
                    num_complex::Complex64::new(0.0, 0.0),
                    CL_REFERENCE,
                    CL_OUTPUT,
                )?
                .re
            } else {
                f64::NAN
            };
            Ok(SweepCase {
                value,
                controller: named.name.clone(),
                stable,
                response,
                final_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter,
        values: values.to_vec(),
        controllers: controllers.iter().map(|c| c.name.clone()).collect(),
        cases,
    })
}

/// Output `y` at time `t` of the closed loop under a unit reference step,
/// from one exact discretization over the whole horizon.
pub fn final_output(plant: &PlantModel, controller: &TwoInputController, t: f64) -> Result<f64> {
    let cl = closed_loop(&plant.state_space(), controller)?;
    let x = step_state_at(&cl, CL_REFERENCE, t)?;
    let y = (cl.c().row(CL_OUTPUT) * x)[(0, 0)] + cl.d()[(CL_OUTPUT, CL_REFERENCE)];
    Ok(y)
}

fn cap_trace(values: &mut [f64], cap: f64) {
    let mut last = 0.0;
    for v in values.iter_mut() {
        if v.is_finite() {
            *v = v.clamp(-cap, cap);
        } else if v.is_nan() {
            *v = if last < 0.0 { -cap } else { cap };
        } else {
            *v = v.signum() * cap;
        }
        last = *v;
    }
}

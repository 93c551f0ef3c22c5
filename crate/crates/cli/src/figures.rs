//! The eight figures: step sweeps, controller Bode plots and gang-of-seven
//! magnitudes, first order (1-4) then second order (5-8).

use std::path::Path;

use adrc_pid::adrc::{AdrcDesign, AdrcTuning};
use adrc_pid::analysis::{
    bode_set, gang_of_seven, step_sweep, NamedController, PlantModel, SweepParameter, SweepResult,
};
use adrc_pid::lti::TransferFunction;
use adrc_pid::pid_equiv::{EquivalentParams, TwoDofPid};

use crate::config::ExperimentConfig;
use crate::output::{fmt_exact, Table};
use crate::svg::{Chart, Panel, Series};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    Sweep(SweepParameter),
    Bode,
    Gang,
}

/// Order and content of figure `id`.
pub fn figure_kind(id: u8) -> Result<(u8, FigureKind), CliError> {
    let kind = match (id - 1) % 4 {
        0 => FigureKind::Sweep(SweepParameter::Gain),
        1 => FigureKind::Sweep(SweepParameter::TimeConstant),
        2 => FigureKind::Bode,
        _ => FigureKind::Gang,
    };
    match id {
        1..=4 => Ok((1, kind)),
        5..=8 => Ok((2, kind)),
        _ => Err(CliError::Usage(format!("figure id must be 1-8, got {id}"))),
    }
}

pub struct ControllerSet {
    pub design: AdrcDesign,
    pub equivalent: EquivalentParams,
    pub controllers: Vec<NamedController>,
}

pub fn equivalent_name(order: u8) -> &'static str {
    if order == 1 {
        "pif"
    } else {
        "pidf"
    }
}

/// ADRC, its equivalent PI(D)F and the optional comparison PID, in that order.
pub fn controller_set(cfg: &ExperimentConfig, order: u8) -> Result<ControllerSet, CliError> {
    let t = &cfg.tuning;
    let design = AdrcDesign::tune(order, AdrcTuning::new(t.ts, t.g, t.b0)?)?;
    let equivalent = EquivalentParams::from_design(&design);
    let mut controllers = vec![
        NamedController::new("adrc", design.controller()),
        NamedController::new(equivalent_name(order), equivalent.controller()?),
    ];
    if let Some([kp, ki, kd, tf, b]) = cfg.compare.pid {
        let pid = TwoDofPid { kp, ki, kd, tf, b };
        controllers.push(NamedController::new("pid", pid.controller()?));
    }
    Ok(ControllerSet {
        design,
        equivalent,
        controllers,
    })
}

pub fn plant(cfg: &ExperimentConfig, order: u8) -> Result<PlantModel, CliError> {
    let p = &cfg.plant;
    Ok(if order == 1 {
        PlantModel::first_order(p.k, p.t)?
    } else {
        PlantModel::second_order(p.k, p.t, p.d)?
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSummary {
    pub value: f64,
    pub controller: String,
    pub stable: bool,
    /// Steady-state `y` (closed-loop DC gain); NaN when unstable.
    pub final_value: f64,
    /// Last simulated sample.
    pub y_end: f64,
}

pub struct Figure {
    pub id: u8,
    pub table: Table,
    pub chart: Chart,
    pub cases: Vec<CaseSummary>,
}

impl Figure {
    pub fn cases_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value", "controller", "stable", "final_value", "y_end"])
            .expect("memory write");
        for c in &self.cases {
            w.write_record([
                fmt_exact(c.value),
                c.controller.clone(),
                c.stable.to_string(),
                fmt_exact(c.final_value),
                fmt_exact(c.y_end),
            ])
            .expect("memory write");
        }
        String::from_utf8(w.into_inner().expect("memory write")).expect("utf-8")
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_file(
            &dir.join(format!("fig{}.csv", self.id)),
            &self.table.to_csv_string(),
        )?;
        write_file(
            &dir.join(format!("fig{}.svg", self.id)),
            &self.chart.render(),
        )?;
        if !self.cases.is_empty() {
            write_file(
                &dir.join(format!("fig{}_cases.csv", self.id)),
                &self.cases_csv(),
            )?;
        }
        Ok(())
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn figure(id: u8, cfg: &ExperimentConfig) -> Result<Figure, CliError> {
    let (order, kind) = figure_kind(id)?;
    let set = controller_set(cfg, order)?;
    let plant = plant(cfg, order)?;
    match kind {
        FigureKind::Sweep(param) => {
            let values = match param {
                SweepParameter::Gain => cfg.sweep.gains(order),
                SweepParameter::TimeConstant => cfg.sweep.time_constants(order),
            };
            let result = run_sweep(cfg, &plant, param, values, &set.controllers)?;
            Ok(sweep_figure(id, order, &result))
        }
        FigureKind::Bode => bode_figure(id, order, cfg, &set),
        FigureKind::Gang => gang_figure(id, order, cfg, &plant, &set),
    }
}

pub fn run_sweep(
    cfg: &ExperimentConfig,
    plant: &PlantModel,
    param: SweepParameter,
    values: &[f64],
    controllers: &[NamedController],
) -> Result<SweepResult, CliError> {
    Ok(step_sweep(
        plant,
        param,
        values,
        controllers,
        cfg.t_end(),
        cfg.simulation.n_steps,
    )?)
}

pub fn sweep_table(result: &SweepResult) -> Table {
    let mut table = Table::new();
    table.push("t", result.cases[0].response.t.clone());
    for case in &result.cases {
        table.push(
            format!(
                "y_{}={}_{}",
                result.parameter.name(),
                case.value,
                case.controller
            ),
            case.output().to_vec(),
        );
    }
    table
}

pub fn case_summaries(result: &SweepResult) -> Vec<CaseSummary> {
    result
        .cases
        .iter()
        .map(|c| CaseSummary {
            value: c.value,
            controller: c.controller.clone(),
            stable: c.stable,
            final_value: c.final_value,
            y_end: *c.output().last().expect("nonempty trace"),
        })
        .collect()
}

fn sweep_figure(id: u8, order: u8, result: &SweepResult) -> Figure {
    Figure {
        id,
        table: sweep_table(result),
        chart: sweep_chart(order, result),
        cases: case_summaries(result),
    }
}

/// Traces of all cases; the y range follows the stable ones only.
pub fn sweep_chart(order: u8, result: &SweepResult) -> Chart {
    let name = result.parameter.name();
    let mut panel = Panel::new("t (s)", "y", false, false);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for c in result.cases.iter().filter(|c| c.stable) {
        for &y in c.output() {
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    let pad = 0.05 * (hi - lo);
    panel.y_range = Some((lo - pad, hi + pad));
    for (i, &v) in result.values.iter().enumerate() {
        for (j, ctrl) in result.controllers.iter().enumerate() {
            let c = result.case(i, j);
            let flag = if c.stable { "" } else { " (unstable)" };
            let y = c.output();
            // a diverging trace is drawn up to where it leaves the frame
            let keep = if c.stable {
                y.len()
            } else {
                y.iter()
                    .position(|v| *v < lo - pad || *v > hi + pad)
                    .map_or(y.len(), |i| i + 1)
            };
            panel.series.push(Series {
                name: format!("{name}={v} {ctrl}{flag}"),
                x: c.response.t[..keep].to_vec(),
                y: y[..keep].to_vec(),
                color: i,
                dash: j,
            });
        }
    }
    let mut chart = Chart::new(&format!(
        "Step response r to y, order {order}, different values of {name}"
    ));
    chart.panels.push(panel);
    chart
}

fn bode_figure(
    id: u8,
    order: u8,
    cfg: &ExperimentConfig,
    set: &ControllerSet,
) -> Result<Figure, CliError> {
    let omega = cfg.omega();
    let mut tfs: Vec<(String, TransferFunction)> = Vec::new();
    for nc in &set.controllers {
        tfs.push((format!("{}_Cr", nc.name), nc.controller.reference_tf()));
        tfs.push((format!("{}_Cy", nc.name), nc.controller.feedback_tf()));
    }
    let bode = bode_set(&tfs, &omega)?;

    let mut table = Table::new();
    table.push("omega", omega.clone());
    let mut mag = Panel::new("omega (rad/s)", "magnitude (dB)", true, false);
    let mut phase = Panel::new("omega (rad/s)", "phase (deg)", true, false);
    for (k, (name, _)) in tfs.iter().enumerate() {
        let db: Vec<f64> = bode.magnitude[k].iter().map(|m| 20.0 * m.log10()).collect();
        table.push(format!("{name}_mag_db"), db.clone());
        table.push(format!("{name}_phase_deg"), bode.phase_deg[k].clone());
        let (color, dash) = (k % 2, k / 2);
        mag.series.push(Series {
            name: name.clone(),
            x: omega.clone(),
            y: db,
            color,
            dash,
        });
        phase.series.push(Series {
            name: name.clone(),
            x: omega.clone(),
            y: bode.phase_deg[k].clone(),
            color,
            dash,
        });
    }
    let mut chart = Chart::new(&format!("Bode plot of the controllers, order {order}"));
    chart.panels.push(mag);
    chart.panels.push(phase);
    Ok(Figure {
        id,
        table,
        chart,
        cases: Vec::new(),
    })
}

fn gang_figure(
    id: u8,
    order: u8,
    cfg: &ExperimentConfig,
    plant: &PlantModel,
    set: &ControllerSet,
) -> Result<Figure, CliError> {
    let omega = cfg.omega();
    let mut table = Table::new();
    table.push("omega", omega.clone());
    let mut panel = Panel::new("omega (rad/s)", "magnitude", true, true);
    for (j, nc) in set.controllers.iter().enumerate() {
        let gang = gang_of_seven(plant, &nc.controller)?;
        for (k, values) in gang.freq_response(&omega).into_iter().enumerate() {
            let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
            let member = adrc_pid::analysis::GangOfSeven::NAMES[k];
            table.push(format!("{}_{member}", nc.name), mags.clone());
            panel.series.push(Series {
                name: format!("{member} {}", nc.name),
                x: omega.clone(),
                y: mags,
                color: k,
                dash: j,
            });
        }
    }
    let mut chart = Chart::new(&format!("Gang-of-seven, order {order}"));
    chart.panels.push(panel);
    Ok(Figure {
        id,
        table,
        chart,
        cases: Vec::new(),
    })
}

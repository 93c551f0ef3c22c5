//! Front end for the `adrc-pid` experiments: configuration, figure files,
//! tuning and verification reports.

pub mod config;
pub mod figures;
pub mod output;
pub mod report;
pub mod svg;

use std::io::Write;
use std::path::Path;

use adrc_pid::analysis::SweepParameter;
use thiserror::Error;

use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag or config value.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0} verification check(s) failed")]
    Verification(usize),
    #[error("{0}")]
    Compute(adrc_pid::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
            Self::Verification(_) | Self::Compute(_) => 1,
        }
    }
}

impl From<adrc_pid::Error> for CliError {
    fn from(e: adrc_pid::Error) -> Self {
        match e {
            adrc_pid::Error::InvalidParameter { .. } => Self::Usage(e.to_string()),
            other => Self::Compute(other),
        }
    }
}

fn stdout_io(e: std::io::Error) -> CliError {
    CliError::Io(format!("stdout: {e}"))
}

/// Copy of the resolved configuration next to the outputs.
pub fn echo_config(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    figures::write_file(&dir.join("config.toml"), &cfg.to_toml())
}

pub fn cmd_tune(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let t = &cfg.tuning;
    let text = report::tune_report(t.order, t.ts, t.g, t.b0)?;
    out.write_all(text.as_bytes()).map_err(stdout_io)
}

pub fn cmd_figure(id: u8, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let fig = figures::figure(id, cfg)?;
    let dir = Path::new(&cfg.output.dir);
    fig.write(dir)?;
    echo_config(cfg, dir)?;
    writeln!(out, "wrote {}", dir.join(format!("fig{id}.csv")).display()).map_err(stdout_io)?;
    writeln!(out, "wrote {}", dir.join(format!("fig{id}.svg")).display()).map_err(stdout_io)?;
    for c in fig.cases.iter().filter(|c| !c.stable) {
        writeln!(
            out,
            "unstable: {}={} {}",
            fig_param(id),
            c.value,
            c.controller
        )
        .map_err(stdout_io)?;
    }
    Ok(())
}

fn fig_param(id: u8) -> &'static str {
    if id % 4 == 1 {
        "K"
    } else {
        "T"
    }
}

pub fn cmd_verify(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let checks = report::verify_checks(cfg)?;
    for c in &checks {
        writeln!(out, "{c}").map_err(stdout_io)?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(out, "{} checks, {} failed", checks.len(), failed).map_err(stdout_io)?;
    if failed > 0 {
        Err(CliError::Verification(failed))
    } else {
        Ok(())
    }
}

/// Step sweep at the configured order: traces to CSV/SVG, one summary line
/// per case on `out`.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    param: SweepParameter,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let order = cfg.tuning.order;
    let set = figures::controller_set(cfg, order)?;
    let plant = figures::plant(cfg, order)?;
    let values = match param {
        SweepParameter::Gain => cfg.sweep.gains(order),
        SweepParameter::TimeConstant => cfg.sweep.time_constants(order),
    };
    let result = figures::run_sweep(cfg, &plant, param, values, &set.controllers)?;

    let dir = Path::new(&cfg.output.dir);
    let stem = format!("sweep_order{order}_{}", param.name());
    let table = figures::sweep_table(&result);
    figures::write_file(&dir.join(format!("{stem}.csv")), &table.to_csv_string())?;
    figures::write_file(
        &dir.join(format!("{stem}.svg")),
        &figures::sweep_chart(order, &result).render(),
    )?;
    echo_config(cfg, dir)?;

    let io = stdout_io;
    writeln!(
        out,
        "{},controller,stable,final_value,y_end,gap_to_adrc",
        param.name()
    )
    .map_err(io)?;
    let cases = figures::case_summaries(&result);
    for (i, _) in result.values.iter().enumerate() {
        for j in 0..result.controllers.len() {
            let c = &cases[i * result.controllers.len() + j];
            let both_stable = c.stable && result.case(i, 0).stable;
            let gap = if !both_stable {
                f64::NAN
            } else if j == 0 {
                0.0
            } else {
                result.trace_gap(i, 0, j)
            };
            writeln!(
                out,
                "{},{},{},{},{},{}",
                c.value,
                c.controller,
                c.stable,
                output::fmt_sig(c.final_value, 10),
                output::fmt_sig(c.y_end, 10),
                output::fmt_sig(gap, 4)
            )
            .map_err(io)?;
        }
    }
    writeln!(out, "wrote {}", dir.join(format!("{stem}.csv")).display()).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Io("x".into()).exit_code(), 3);
        assert_eq!(CliError::Verification(1).exit_code(), 1);
        let e: CliError = adrc_pid::Error::InvalidParameter {
            name: "b0",
            reason: "must be > 0".into(),
        }
        .into();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(e.to_string(), "b0 must be > 0");
    }

    #[test]
    fn verify_reports_every_check() {
        let mut buf = Vec::new();
        cmd_verify(&ExperimentConfig::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text
            .lines()
            .any(|l| l.starts_with("cy_equivalence_order1: residual=") && l.ends_with("PASS")));
        assert!(text.trim_end().ends_with("0 failed"));
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use adrc_pid::analysis::SweepParameter;
use adrc_pid_cli::config::{parse_compare_pid, ExperimentConfig, Overrides};
use adrc_pid_cli::{cmd_figure, cmd_sweep, cmd_tune, cmd_verify, CliError};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "adrc-pid",
    version,
    about = "ADRC tuning, equivalent PI(D) controllers and figure reproduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Print ADRC gains, the equivalent PI(D)F parameters and its realization
    Tune,
    /// Write fig<ID>.csv and fig<ID>.svg to the output directory
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=8))]
        id: u8,
    },
    /// Run the equivalence and property checks; exit 1 if any fails
    Verify,
    /// Step-response sweep over plant gain or time constant at --order
    Sweep {
        #[arg(long, value_enum, default_value = "k")]
        param: Param,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    K,
    T,
}

#[derive(Args)]
struct Flags {
    /// ADRC order (1 or 2)
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: Option<u8>,
    /// Desired settling time T_s
    #[arg(long, global = true, allow_negative_numbers = true)]
    ts: Option<f64>,
    /// Observer bandwidth factor
    #[arg(long, global = true, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Input gain estimate b0
    #[arg(long, global = true, allow_negative_numbers = true)]
    b0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    plant_k: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    plant_t: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    plant_d: Option<f64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<String>,
    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Extra 2-DOF PID shown in figures: kp,ki,kd,Tf,b
    #[arg(long, global = true, allow_hyphen_values = true)]
    compare_pid: Option<String>,
}

fn resolve(flags: &Flags) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let compare_pid = flags
        .compare_pid
        .as_deref()
        .map(parse_compare_pid)
        .transpose()?;
    cfg.apply(&Overrides {
        order: flags.order,
        ts: flags.ts,
        g: flags.g,
        b0: flags.b0,
        plant_k: flags.plant_k,
        plant_t: flags.plant_t,
        plant_d: flags.plant_d,
        out: flags.out.clone(),
        compare_pid,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.flags)?;
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Tune => cmd_tune(&cfg, &mut stdout),
        Command::Figure { id } => cmd_figure(id, &cfg, &mut stdout),
        Command::Verify => cmd_verify(&cfg, &mut stdout),
        Command::Sweep { param } => {
            let p = match param {
                Param::K => SweepParameter::Gain,
                Param::T => SweepParameter::TimeConstant,
            };
            cmd_sweep(&cfg, p, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

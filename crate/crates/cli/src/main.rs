//! `conicert`: scans, classifications, certificates and propagations from a TOML config.
//!
//! Exit codes: 0 all checks passed, 1 some check failed, 2 usage, config or
//! I/O error, 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{AxisGroup, Overrides, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "conicert", version, about = "Controllability certificates for bilinear quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue and gap surfaces over the scan plane.
    Scan(Common),
    /// Locate and classify eigenvalue intersections.
    Classify(Common),
    /// Run every check and write certificate.json.
    Certify(Common),
    /// Controllability sweeps only, written as certificate.json.
    Sweep(Common),
    /// Propagate a basis state under a piecewise-constant schedule.
    Propagate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// counterexample, enantio, jc or custom.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Grid points per axis: `200` or `200,100`.
    #[arg(long, value_parser = parse_res)]
    grid_res: Option<[usize; 2]>,
    /// Gap levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Axes to freeze in a sweep: `0`, or `0,1` to freeze jointly. Repeatable.
    #[arg(long, value_parser = parse_axes)]
    freeze_axis: Vec<AxisGroup>,
    /// Sweep sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Schedule CSV for `propagate`.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

fn parse_res(s: &str) -> Result<[usize; 2], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [n] => Ok([n, n]),
        [a, b] => Ok([a, b]),
        _ => Err("expected N or N,M".into()),
    }
}

fn parse_axes(s: &str) -> Result<AxisGroup, String> {
    let axes: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p}: {e}")))
        .collect::<Result<_, _>>()?;
    Ok(match axes[..] {
        [a] => AxisGroup::One(a),
        _ => AxisGroup::Many(axes),
    })
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let over = Overrides {
            model: self.model.clone(),
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            grid_res: self.grid_res,
            levels: self.levels.clone(),
            freeze_axes: self.freeze_axis.clone(),
            samples: self.samples,
            schedule: self.schedule.clone(),
        };
        RunConfig::load(self.config.as_deref(), &over)
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Scan(c) => commands::scan(&c.load()?),
        Command::Classify(c) => commands::classify(&c.load()?),
        Command::Certify(c) => commands::certify(&c.load()?),
        Command::Sweep(c) => commands::sweep_only(&c.load()?),
        Command::Propagate(c) => commands::propagate(&c.load()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("conicert: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `smallsphere` command-line tool.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for input
//! and precondition errors.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nalgebra::Vector3;
use thiserror::Error;

use commands::{Command, Settings};
use report::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] smallsphere::Error),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Decompose,
    Energy,
    Minimize,
    Nonvacuum,
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "smallsphere", version, about = "Small-sphere limit of quasi-local energy from curvature at a point")]
struct Args {
    #[arg(value_enum)]
    command: CommandArg,
    /// Curvature input document (TOML)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Observer spatial part `a1,a2,a3`
    #[arg(long, value_parser = parse_observer, allow_hyphen_values = true)]
    observer: Option<Vector3<f64>>,
    #[arg(long)]
    grid_degree: Option<usize>,
    /// identities, integrals, expansion or energy; all suites when omitted
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_observer(s: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b, c] if parts.iter().all(|v| v.is_finite()) => Ok(Vector3::new(*a, *b, *c)),
        _ => Err("expected three finite numbers a1,a2,a3".into()),
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let command = match args.command {
        CommandArg::Decompose => Command::Decompose,
        CommandArg::Energy => Command::Energy,
        CommandArg::Minimize => Command::Minimize,
        CommandArg::Nonvacuum => Command::Nonvacuum,
        CommandArg::Verify => Command::Verify,
    };
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    };
    let doc = args.input.as_deref().map(input::parse_file).transpose()?;
    let settings = Settings {
        observer: args.observer,
        grid_degree: args.grid_degree,
        suite: args.suite.clone(),
        seed: args.seed,
    };
    let report = commands::run(command, doc.as_ref(), &settings)?;
    let text = report.render(format);
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end: argument handling, command dispatch and report
//! rendering for the `dirac-symmetry` binary.

#![allow(clippy::result_large_err)]

pub mod commands;
pub mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ColorChoice, Parser, ValueEnum};
use dirac_core::{ChainError, CoefficientMode, Model, ModelFileError};
use serde_json::{json, Value};

pub use commands::Report;
use render::Style;

/// Name of the environment variable that switches ANSI color on (`1`) or off.
pub const COLOR_ENV: &str = "DIRAC_SYMMETRY_COLOR";

/// Process exit status. The numeric values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Finding = 2,
    InvalidInput = 3,
    BeyondTertiary = 4,
    Internal = 5,
    Inconsistent = 6,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn status(self) -> &'static str {
        match self {
            Exit::Pass => "pass",
            Exit::Finding => "finding",
            Exit::InvalidInput => "invalid-input",
            Exit::BeyondTertiary => "beyond-tertiary",
            Exit::Internal => "internal-error",
            Exit::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Chain,
    TotalHamiltonian,
    FirstClass,
    CheckSymmetry,
    StructureConstants,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Chain => "chain",
            Command::TotalHamiltonian => "total-hamiltonian",
            Command::FirstClass => "first-class",
            Command::CheckSymmetry => "check-symmetry",
            Command::StructureConstants => "structure-constants",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coefficients {
    Constant,
    Polynomial,
}

#[derive(Debug, Parser)]
#[command(
    name = "dirac-symmetry",
    version,
    about = "Dirac constraint chains and dynamical-symmetry checks for polynomial Hamiltonian systems",
    color = ColorChoice::Never
)]
pub struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    pub command: Command,
    /// Model file.
    pub file: PathBuf,
    /// Generator set to use (required when the file has several).
    #[arg(long, value_name = "NAME")]
    pub set: Option<String>,
    /// Coefficient degree bound for weak-equality searches.
    #[arg(long, value_name = "N")]
    pub degree_bound: Option<u32>,
    /// Include H_d - E among the weak-ideal generators.
    #[arg(long, value_name = "BOOL", action = clap::ArgAction::Set)]
    pub on_shell_energy: Option<bool>,
    /// Coefficient class for level preservation.
    #[arg(long, value_enum, value_name = "MODE")]
    pub coefficients: Option<Coefficients>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Everything a run produces; `main` only writes it out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit: Exit,
    pub stdout: String,
    pub stderr: String,
}

/// Reads the color switch from the environment; anything but `1` is off.
pub fn color_from_env() -> bool {
    std::env::var(COLOR_ENV).is_ok_and(|v| v.trim() == "1")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, color: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, color),
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    exit: Exit::Pass,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    exit: Exit::InvalidInput,
                    stdout: String::new(),
                    stderr: text,
                },
            }
        }
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli, color: bool) -> Outcome {
    let style = Style { color };
    let report = match load(cli) {
        Ok(model) => commands::dispatch(cli, &model, style),
        Err(report) => report,
    };
    finish(cli, report)
}

fn load(cli: &Cli) -> Result<Model, Report> {
    let text = std::fs::read_to_string(&cli.file).map_err(|e| {
        Report::error(
            Exit::InvalidInput,
            format!("cannot read {}: {e}", cli.file.display()),
        )
    })?;
    let mut model = Model::from_toml(&text).map_err(|e| model_error(&e))?;
    if let Some(d) = cli.degree_bound {
        model.options.degree_bound = Some(d);
    }
    if let Some(b) = cli.on_shell_energy {
        model.options.on_shell_energy = b;
    }
    if let Some(c) = cli.coefficients {
        model.options.coefficient_mode = match c {
            Coefficients::Constant => CoefficientMode::Constant,
            Coefficients::Polynomial => CoefficientMode::Polynomial,
        };
    }
    Ok(model)
}

fn model_error(e: &ModelFileError) -> Report {
    match e {
        ModelFileError::Chain(c) => chain_error(c),
        other => Report::error(Exit::InvalidInput, other.to_string()),
    }
}

/// Maps a chain failure to its exit status.
pub fn chain_error(e: &ChainError) -> Report {
    let exit = match e {
        ChainError::Inconsistent { .. } => Exit::Inconsistent,
        ChainError::BeyondTertiary { .. } => Exit::BeyondTertiary,
        ChainError::Algebra(_) => Exit::Internal,
        ChainError::DependentPrimaries { .. }
        | ChainError::DependentConstraints { .. }
        | ChainError::NotClosed { .. } => Exit::InvalidInput,
    };
    let mut report = Report::error(exit, e.to_string());
    if let ChainError::Inconsistent { source_name, residual } | ChainError::BeyondTertiary { source_name, residual, .. } = e {
        report.json["source"] = json!(source_name);
        report.json["residual"] = render::poly_value(residual);
    }
    report
}

fn finish(cli: &Cli, report: Report) -> Outcome {
    let Report { exit, text, json, error } = report;
    let mut head = serde_json::Map::new();
    head.insert("command".into(), json!(cli.command.name()));
    head.insert("file".into(), json!(cli.file.display().to_string()));
    head.insert("status".into(), json!(exit.status()));
    head.insert("exit_code".into(), json!(exit.code()));
    if let Value::Object(body) = json {
        head.extend(body);
    }
    let stderr = error.as_ref().map(|m| format!("error: {m}\n")).unwrap_or_default();
    match cli.format {
        Format::Structured => Outcome {
            exit,
            stdout: serde_json::to_string_pretty(&Value::Object(head)).expect("report serializes") + "\n",
            stderr,
        },
        Format::Text => Outcome { exit, stdout: text, stderr },
    }
}

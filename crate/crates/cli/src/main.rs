mod commands;
mod config;
mod error;
mod svg;
mod table;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::config::{Assignments, Command};
use crate::error::CliError;
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    /// Evolve a walk on the line (or a ring) and write its distribution.
    Simulate,
    /// Eigenvalues of the uniform or two-periodic phase-shifted ring.
    Spectrum,
    /// Window-averaged simulation next to the large-time formulas.
    Asymptotic,
    /// Reflection and transmission of a barrier over a momentum sweep.
    Scattering,
    /// Edge walk against the coined walk on the ring.
    Equivalence,
    /// Time-averaged edge distribution on a ring.
    Average,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Simulate => Command::Simulate,
            CommandArg::Spectrum => Command::Spectrum,
            CommandArg::Asymptotic => Command::Asymptotic,
            CommandArg::Scattering => Command::Scattering,
            CommandArg::Equivalence => Command::Equivalence,
            CommandArg::Average => Command::Average,
        }
    }
}

/// Edge-state quantum walk experiments.
///
/// Exit codes: 0 success, 2 invalid configuration, 3 numeric contract
/// violation, 1 I/O failure. EDGEWALK_THREADS caps the worker pool.
#[derive(Debug, Parser)]
#[command(name = "edgewalk", version)]
struct Cli {
    command: CommandArg,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// CSV output path (`-` for stdout).
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG chart of the main result column.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("EDGEWALK_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("EDGEWALK_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn write_svg(table: &ResultTable, path: &PathBuf) -> Result<(), CliError> {
    let Some(column) = table.plot_column else {
        return Err(CliError::Config(format!(
            "{} output has no column to plot",
            table.command.name()
        )));
    };
    let x_name = table.headers[if table.headers[0] == "index" { 1 } else { 0 }];
    let x = table.column(x_name).expect("numeric x column");
    let y = table.column(column).expect("numeric y column");
    let title = format!("edgewalk {}", table.command.name());
    fs::write(path, svg::histogram(&x, &y, x_name, column, &title))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<usize, CliError> {
    configure_threads()?;
    let mut assignments = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Assignments::parse_file(&text, &path.display().to_string())?
        }
        None => Assignments::default(),
    };
    for (i, s) in cli.set.iter().enumerate() {
        assignments.insert(s, &format!("--set #{}", i + 1))?;
    }
    let cfg = assignments.into_config()?;
    let table = commands::run(cli.command.into(), &cfg)?;
    let csv = table.to_csv()?;
    if cli.out.as_os_str() == "-" {
        std::io::stdout().write_all(&csv)?;
    } else {
        fs::write(&cli.out, &csv)?;
    }
    if let Some(path) = &cli.svg {
        write_svg(&table, path)?;
    }
    Ok(table.rows.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rows) => {
            if cli.out.as_os_str() != "-" {
                eprintln!("edgewalk: {rows} rows written to {}", cli.out.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("edgewalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

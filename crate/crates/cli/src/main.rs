use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gkw_core::report::{emit, run, Command, Format, ReportError, RunConfig, Source, EXIT_CONFIG};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    /// Validate the pair, the moment map and the quotient bi-Hermitian data.
    Verify,
    /// Exact checks on the deformation.
    Deform,
    /// Sample the level set and tabulate quotient types.
    Reduce,
    /// Every stage, including bracket closure tests.
    Sweep,
    /// List the built-in cases.
    Catalog,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fmt {
    Json,
    Csv,
    Text,
}

/// Generalized Kahler reduction workbench.
#[derive(Debug, Parser)]
#[command(name = "gkw", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Built-in case name (see `gkw catalog`).
    #[arg(long, conflicts_with = "scenario")]
    case: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Validity tolerance for residual checks.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Fmt,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Args {
    fn config(&self) -> RunConfig {
        let command = match self.command {
            Cmd::Verify => Command::Verify,
            Cmd::Deform => Command::Deform,
            Cmd::Reduce => Command::Reduce,
            Cmd::Sweep => Command::Sweep,
            Cmd::Catalog => Command::Catalog,
        };
        let source = match (&self.case, &self.scenario) {
            (Some(c), _) => Some(Source::Case(c.clone())),
            (None, Some(p)) => Some(Source::ScenarioFile(p.clone())),
            (None, None) => None,
        };
        RunConfig {
            command,
            source,
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            format: match self.format {
                Fmt::Json => Format::Json,
                Fmt::Csv => Format::Csv,
                Fmt::Text => Format::Text,
            },
            out: self.out.clone(),
        }
    }
}

fn execute(config: &RunConfig) -> Result<i32, ReportError> {
    let report = run(config)?;
    let bytes = emit(&report, config.format)?;
    match &config.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| ReportError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| ReportError::Config(format!("cannot write output: {e}")))?,
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    match execute(&args.config()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gkw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 for usage or domain problems, 2 for data
//! problems, 3 for numeric failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ppm_var::config::{load_config, RunConfig};
use ppm_var::error::Error;
use ppm_var::jobs::{run_job, JobCommand};
use ppm_var::series::{load_returns, SeriesSource};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliCommand {
    Estimate,
    Backtest,
    Outliers,
    Sensitivity,
    Aggregate,
}

impl From<CliCommand> for JobCommand {
    fn from(c: CliCommand) -> JobCommand {
        match c {
            CliCommand::Estimate => JobCommand::Estimate,
            CliCommand::Backtest => JobCommand::Backtest,
            CliCommand::Outliers => JobCommand::Outliers,
            CliCommand::Sensitivity => JobCommand::Sensitivity,
            CliCommand::Aggregate => JobCommand::Aggregate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliFormat {
    Prices,
    Returns,
}

/// Bayesian Value-at-Risk engine on Normal product partition models.
#[derive(Debug, Parser)]
#[command(name = "ppm-var", version, about)]
struct Cli {
    /// Job to run.
    #[arg(long)]
    command: CliCommand,

    /// Input file: delimiter-separated text with a header row.
    #[arg(long)]
    input: PathBuf,

    /// Whether the input holds prices or returns.
    #[arg(long, value_enum, default_value = "returns")]
    format: CliFormat,

    /// Optional configuration file; defaults apply otherwise.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for reports and tables.
    #[arg(long, default_value = "out")]
    output: PathBuf,
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.mcmc.seed = seed;
    }

    let format = match cli.format {
        CliFormat::Prices => SeriesSource::Prices,
        CliFormat::Returns => SeriesSource::Returns,
    };
    let loaded = load_returns(&cli.input, format, &cfg.input)?;
    if loaded.skipped_rows > 0 {
        eprintln!(
            "warning: skipped {} rows with missing values",
            loaded.skipped_rows
        );
    }

    let input_label = cli.input.display().to_string();
    let output = run_job(
        &cfg,
        cli.command.into(),
        &loaded.series,
        &input_label,
        &cli.output,
    )?;
    print!("{}", output.summary);
    for file in &output.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not failures.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

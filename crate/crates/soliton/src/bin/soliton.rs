//! `soliton` — build steady soliton momentum profiles, reconstruct Kähler
//! potentials, and verify the geometry, from a single JSON config.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use soliton::cli::{self, Overrides};
use soliton::config::OutputFormat;

#[derive(Parser)]
#[command(
    name = "soliton",
    version,
    about = "Steady Kahler-Ricci solitons on line and vector bundles via the momentum construction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration document (strict schema).
    #[arg(long)]
    config: PathBuf,
    /// Output file (overrides output.path; stdout if neither is set).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (overrides output.format).
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Override grid.tau_max.
    #[arg(long)]
    tau_max: Option<f64>,
    /// Override grid.samples.
    #[arg(long)]
    samples: Option<usize>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format {other:?} (csv|json)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the momentum profile and its ODE residual over the tau grid.
    Solve(Common),
    /// Invert the Legendre relation and tabulate (t, tau, f, f'', f''').
    Potential(Common),
    /// Emit the geometry report (extension, completeness, Ricci sign,
    /// volume growth, weight identities) as JSON.
    Report(Common),
    /// Compare the closed form against the quadrature and ODE-march oracles;
    /// nonzero exit on disagreement.
    Validate(Common),
}

type CommandFn = fn(&std::path::Path, &Overrides) -> Result<(), cli::CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SOLITON_LOG", "warn")).init();

    let cli = Cli::parse();
    let (cmd, common): (CommandFn, &Common) = match &cli.command {
        Command::Solve(c) => (cli::cmd_solve, c),
        Command::Potential(c) => (cli::cmd_potential, c),
        Command::Report(c) => (cli::cmd_report, c),
        Command::Validate(c) => (cli::cmd_validate, c),
    };
    let overrides = Overrides {
        out: common.out.clone(),
        format: common.format,
        tau_max: common.tau_max,
        samples: common.samples,
    };
    match cmd(&common.config, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("soliton: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

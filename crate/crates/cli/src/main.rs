use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use hardy_choquard_cli::commands::{self, Context};
use hardy_choquard_cli::config::Format;
use hardy_choquard_cli::output::Outputs;
use hardy_choquard_cli::suites::{self, Suite};
use hardy_choquard_cli::{exit_code, RunConfig};

#[derive(Parser)]
#[command(
    name = "hcnls",
    version,
    about = "Choquard NLS with a critical Hardy potential"
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured table formats.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

#[derive(Subcommand)]
enum Command {
    /// Computes the ground state, sharp constant and threshold quantities.
    GroundState,
    /// Evolves an initial datum and compares the outcome with its verdict.
    Simulate {
        /// Field file; overrides the `datum` section.
        #[arg(long)]
        datum: Option<PathBuf>,
    },
    /// Prints the global-existence/blow-up verdict with its witnesses.
    Classify {
        #[arg(long)]
        datum: Option<PathBuf>,
    },
    /// Runs a property suite and prints a pass/fail table.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

fn run(cli: Cli) -> Result<u8> {
    let path = cli
        .config
        .ok_or_else(|| hardy_choquard_cli::ConfigError("--config PATH is required".into()))?;
    let mut config = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = cli.out {
        config.outputs.directory = dir;
    }
    if let Some(f) = cli.format {
        config.outputs.formats = vec![match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::JsonLines => Format::JsonLines,
        }];
    }
    let mut out = Outputs::create(&config.outputs.directory, config.outputs.formats.clone())?;
    let mut ctx = Context::new(config.clone())?;
    let (name, result) = match &cli.command {
        Command::GroundState => ("ground-state", commands::ground_state(&mut ctx, &mut out)),
        Command::Simulate { datum } => (
            "simulate",
            commands::simulate_cmd(&mut ctx, datum.as_deref(), &mut out),
        ),
        Command::Classify { datum } => (
            "classify",
            commands::classify_cmd(&mut ctx, datum.as_deref(), &mut out),
        ),
        Command::Verify { suite } => ("verify", suites::run(&mut ctx, *suite, &mut out)),
    };
    out.manifest(name, &config)?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

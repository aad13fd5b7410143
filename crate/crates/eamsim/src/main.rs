use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eamsim::cli::{run, RunRequest, ScenarioKind};

/// Quantum-cutting exciton dynamics on multi-arm molecular triads.
#[derive(Parser)]
#[command(name = "eamsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Donor-to-Bell-pair dynamics next to the full arm-sector model.
    Triad(RunArgs),
    /// Acceptor entanglement entropy over a time and detuning grid.
    EntropyMap(RunArgs),
    /// Wave-packet spreading along a donor-bridged acceptor chain.
    Chain(RunArgs),
    /// Five-arm dynamics resolving allowed and forbidden EAM channels.
    FiveArm(RunArgs),
    /// Cutting matrix elements for every EAM pair in the window.
    SelectionTable(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Parameter file, one `key = value` per line.
    #[arg(long)]
    config: PathBuf,

    /// Directory the output files are written into.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Parameter override applied after the file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Triad(args) => (ScenarioKind::Triad, args),
        Command::EntropyMap(args) => (ScenarioKind::EntropyMap, args),
        Command::Chain(args) => (ScenarioKind::Chain, args),
        Command::FiveArm(args) => (ScenarioKind::FiveArm, args),
        Command::SelectionTable(args) => (ScenarioKind::SelectionTable, args),
    };
    let request = RunRequest {
        kind,
        config_path: args.config,
        out_dir: args.out,
        overrides: args.overrides,
    };
    match run(&request) {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyfrac::cli::commands;

#[derive(Parser)]
#[command(name = "polyfrac", version, about = "Polygonal finite elements with nonlocal damage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Displacement-controlled damage simulation
    Run { config: PathBuf },
    /// Single linear-elastic solve
    Elastic { config: PathBuf },
    /// Plate-with-hole convergence study
    Convergence { config: PathBuf },
    /// Linear patch test on the configured mesh
    Patch { config: PathBuf },
    /// Write a benchmark configuration
    Preset {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let result = match &cli.command {
        Command::Run { config } => commands::run(config, &mut out),
        Command::Elastic { config } => commands::elastic(config, &mut out),
        Command::Convergence { config } => commands::convergence(config, &mut out),
        Command::Patch { config } => commands::patch(config, &mut out),
        Command::Preset { name, out: dir } => commands::write_preset(name, dir, &mut out).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use korteweg_cli::{experiments, run_config, CliError};

#[derive(Parser)]
#[command(name = "korteweg-lab", version, about = "Numerical laboratory for the Korteweg capillary-fluid system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-snapshot sup and L² differences between two runs.
    Compare {
        manifest_a: PathBuf,
        manifest_b: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let (m, dir) = run_config(&config, seed, out)?;
            if !cli.quiet {
                println!("{}: {} -> {}", m.experiment, m.termination.cause, dir.display());
                println!("{}", serde_json::to_string_pretty(&m.summary)?);
            }
            if m.exit_code != 0 {
                eprintln!("run stopped early: {}", m.termination.cause);
            }
            Ok(m.exit_code)
        }
        Command::Compare { manifest_a, manifest_b, out } => {
            let csv = experiments::compare(&manifest_a, &manifest_b)?;
            match out {
                Some(p) => std::fs::write(p, csv)?,
                None if !cli.quiet => print!("{csv}"),
                None => {}
            }
            Ok(0)
        }
    }
}

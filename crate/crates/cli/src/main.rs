use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use splitkit_cli::{run, validate, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "splitkit",
    version,
    about = "Run three-operator splitting experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one config and write its trace and summary.
    Run {
        config: PathBuf,
        /// Directory that relative output paths are resolved against.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Report every problem with a config without running it.
    Validate { config: PathBuf },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            max_iter,
            tol,
        } => {
            let mut cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            Overrides { seed, max_iter, tol }.apply(&mut cfg);
            match run(&cfg, &out) {
                Ok(report) => {
                    let iterations = report.trace.len();
                    println!("{:?} after {iterations} iterations", report.status);
                    ExitCode::from(report.status.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let findings = validate(&cfg);
            if findings.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for f in &findings {
                    println!("{f}");
                }
                ExitCode::from(1)
            }
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fewbody_cli::{jobs, load_config, Analysis, JobError};

#[derive(Parser)]
#[command(name = "fewbody", version, about = "Exact diagonalization of few particles in a 1D trap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct JobArgs {
    /// TOML job description.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sector eigenvalues at each coupling.
    Spectrum(JobArgs),
    /// Levels tracked across the coupling grid.
    Sweep(JobArgs),
    /// Unfolded spacing statistics of one spectrum.
    Stats(JobArgs),
    /// Entanglement entropy of an evolving two-particle state.
    Entangle(JobArgs),
    /// Centre-of-mass / relative separation checks.
    Comrel(JobArgs),
    /// Tensor-product structure check of operator algebras.
    TpsCheck(JobArgs),
    /// Every analysis listed in the config.
    Run(JobArgs),
}

fn run(cli: Cli) -> Result<(), JobError> {
    let (args, analysis) = match cli.command {
        Command::Spectrum(a) => (a, Some(Analysis::Spectrum)),
        Command::Sweep(a) => (a, Some(Analysis::Sweep)),
        Command::Stats(a) => (a, Some(Analysis::Stats)),
        Command::Entangle(a) => (a, Some(Analysis::Entangle)),
        Command::Comrel(a) => (a, Some(Analysis::Comrel)),
        Command::TpsCheck(a) => (a, Some(Analysis::TpsDemo)),
        Command::Run(a) => (a, None),
    };
    let mut job = load_config(&args.config)?;
    if let Some(a) = analysis {
        job = job.only(a)?;
    }
    if let Some(dir) = args.out {
        job.output = Some(dir);
    }
    let manifest = jobs::run_job(&job)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, f.path);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fewbody: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

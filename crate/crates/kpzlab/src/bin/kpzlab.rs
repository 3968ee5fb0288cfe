use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kpzlab::experiments::{prepare, ExperimentSpec, Kind, Overrides};
use kpzlab::{Error, Result};

/// Runs one experiment and writes JSON and CSV results.
#[derive(Parser)]
#[command(name = "kpzlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment spec (JSON). Without it the kind's defaults are used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the spec's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, falling back to the spec and then to KPZLAB_THREADS. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Master seed; overrides the spec's master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the JSON schema of the parameters object and exit.
    #[arg(long)]
    schema: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Renormalization constants of a driving function
    Constants(Common),
    /// Height function trajectories of the particle system
    Simulate(Common),
    /// Exhaustive check of the drift identity of the Gärtner transform
    Duality(Common),
    /// Kipnis–Varadhan bound for a block average, with an exact oracle
    Kv(Common),
    /// Kipnis–Varadhan bound for a product of two local functions
    Kv2(Common),
    /// Tails of canonical block averages and the martingale structure
    Azuma(Common),
    /// Generator structure, entropy production, Lp and resolvent bounds on small rings
    ExactSuite(Common),
    /// Heat kernel bounds, matrix exponential and Monte Carlo cross-check
    HeatkernelVerify(Common),
    /// Decay of the Boltzmann–Gibbs functional with N
    BgDecay(Common),
    /// Discrepancy propagation between the global and localized processes
    Coupling(Common),
    /// One-point statistics of the height function against the stochastic heat equation
    KpzCompare(Common),
    /// Space and time regularity moduli of the Gärtner transform
    Regularity(Common),
}

impl Command {
    fn split(self) -> (Kind, Common) {
        match self {
            Command::Constants(c) => (Kind::Constants, c),
            Command::Simulate(c) => (Kind::Simulate, c),
            Command::Duality(c) => (Kind::Duality, c),
            Command::Kv(c) => (Kind::Kv, c),
            Command::Kv2(c) => (Kind::Kv2, c),
            Command::Azuma(c) => (Kind::Azuma, c),
            Command::ExactSuite(c) => (Kind::ExactSuite, c),
            Command::HeatkernelVerify(c) => (Kind::HeatkernelVerify, c),
            Command::BgDecay(c) => (Kind::BgDecay, c),
            Command::Coupling(c) => (Kind::Coupling, c),
            Command::KpzCompare(c) => (Kind::KpzCompare, c),
            Command::Regularity(c) => (Kind::Regularity, c),
        }
    }
}

fn run(kind: Kind, common: Common) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    if common.schema {
        let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&kind.parameter_schema())?);
        return Ok(());
    }
    let spec = match &common.config {
        Some(path) => ExperimentSpec::from_file(path)?,
        None => ExperimentSpec::new(kind),
    };
    if spec.kind != kind {
        return Err(Error::Validation(format!("config is for `{}` but the subcommand is `{kind}`", spec.kind)));
    }
    let overrides = Overrides { out_dir: common.out, threads: common.threads, seed: common.seed };
    for path in prepare(&spec, &overrides)?.execute()? {
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let (kind, common) = Cli::parse().command.split();
    match run(kind, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kpzlab {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

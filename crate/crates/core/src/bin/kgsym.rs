use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use kgsym::harness::{self, ExperimentConfig, ExperimentKind};
use kgsym::KgError;

#[derive(Parser)]
#[command(name = "kgsym", version, about = "Klein-Gordon integrator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error against a certified reference over a step-size sweep.
    Convergence(RunArgs),
    /// Wall clock against error over a step-size sweep.
    Efficiency(RunArgs),
    /// Relative energy error over a long run.
    EnergyDrift(RunArgs),
    /// Single run with optional state snapshots.
    Simulate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed_override: Option<u64>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_BLOW_UP: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn exit_code(e: &KgError) -> u8 {
    match e {
        KgError::BlowUp { .. } => EXIT_BLOW_UP,
        KgError::Config(_)
        | KgError::Parameter(_)
        | KgError::UnknownName { .. }
        | KgError::InvalidGrid(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn execute(kind: ExperimentKind, args: RunArgs) -> Result<bool, KgError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if config.kind != kind {
        return Err(KgError::Config(format!(
            "{} holds a {} config",
            args.config.display(),
            config.kind.name()
        )));
    }
    if let Some(seed) = args.seed_override {
        config.override_seed(seed);
    }
    let (mut report, snapshots) = harness::run(&config, args.threads)?;
    for sweep in &report.sweeps {
        match &sweep.fit {
            Some(fit) => info!("{}: fitted order {:.3}", sweep.scheme, fit.slope),
            None => info!("{}: no order fitted", sweep.scheme),
        }
    }
    for run in &report.energy {
        if let Some(d) = &run.drift {
            info!("{}: max |dH/H| = {:.3e}", run.scheme, d.max_abs_relative_error);
        }
    }
    for path in harness::write_outputs(&mut report, &snapshots, &args.out)? {
        println!("{}", path.display());
    }
    Ok(report.has_blow_up())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Convergence(a) => (ExperimentKind::Convergence, a),
        Command::Efficiency(a) => (ExperimentKind::Efficiency, a),
        Command::EnergyDrift(a) => (ExperimentKind::EnergyDrift, a),
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
    };
    match execute(kind, args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            error!("at least one run blew up");
            ExitCode::from(EXIT_BLOW_UP)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ledg_lab::{Experiment, ExperimentConfig, LabError, RunOptions};

#[derive(Parser)]
#[command(name = "ledg-lab", version, about = "Run locally exact discrete gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectories of each scheme next to the reference solution.
    Simulate(Common),
    /// Relative period error over a grid of initial momenta.
    SweepP0(Common),
    /// Relative period error over a grid of time steps.
    SweepEps(Common),
    /// Near-separatrix trajectories (defaults: p0 = 1.9999999999, eps = 0.9, 40 steps).
    Separatrix(Common),
    /// Effective step ratio δ(x)/ε over [−π, π].
    DeltaProfile(Common),
    /// Global error at t = 1 against the step, with fitted slopes.
    OrderStudy(Common),
    /// Run whatever experiment the config names.
    Run {
        #[command(flatten)]
        common: Common,
        /// Overrides the config's experiment.
        #[arg(long)]
        experiment: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Adds a wall_time column to sweep output.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ledg-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), LabError> {
    let (common, experiment) = match command {
        Command::Simulate(c) => (c, Some(Experiment::Simulate)),
        Command::SweepP0(c) => (c, Some(Experiment::SweepP0)),
        Command::SweepEps(c) => (c, Some(Experiment::SweepEps)),
        Command::Separatrix(c) => (c, Some(Experiment::Separatrix)),
        Command::DeltaProfile(c) => (c, Some(Experiment::DeltaProfile)),
        Command::OrderStudy(c) => (c, Some(Experiment::OrderStudy)),
        Command::Run { common, experiment } => (common, experiment.map(|e| e.parse()).transpose()?),
    };
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(e) = experiment {
        config.experiment = e;
    }
    if let Some(out) = common.out {
        config.output_path = out;
    }
    if let Some(w) = common.workers {
        config.workers = w;
    }
    ledg_lab::run(&config, RunOptions { timing: common.timing })?;
    Ok(())
}

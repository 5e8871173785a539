use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stratlab::harness::config::{RunConfig, Scenario};
use stratlab::harness::{resume, run};

#[derive(Parser)]
#[command(name = "stratlab", version, about = "Stratified Couette flow laboratory: hypocoercive certification, spectral simulation, and decay-rate measurement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Dotted-key overrides, e.g. --set params.nu=0.02 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides output.dir from the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the per-mode Lyapunov inequality over a frequency grid.
    CertifyLinear(CommonArgs),
    /// Fit enhanced-dissipation / Taylor-dispersion rates per x-frequency.
    SweepModes(CommonArgs),
    /// Run the nonlinear (or linearized) pseudo-spectral simulation.
    Simulate(CommonArgs),
    /// Fit power-law or exponential rates from a CSV time series.
    FitRates(CommonArgs),
    /// Evaluate the smallness conditions on the weight constants.
    CheckConstants(CommonArgs),
    /// Continue a simulation from a snapshot.
    Resume {
        #[command(flatten)]
        common: CommonArgs,
        /// Snapshot file to continue from.
        #[arg(long)]
        snapshot: PathBuf,
        /// New end time.
        #[arg(long)]
        t_end: f64,
    },
}

fn dispatch() -> stratlab::Result<bool> {
    let cli = Cli::parse();
    let (scenario, common) = match &cli.command {
        Command::CertifyLinear(c) => (Scenario::CertifyLinear, c),
        Command::SweepModes(c) => (Scenario::SweepModes, c),
        Command::Simulate(c) => (Scenario::Simulate, c),
        Command::FitRates(c) => (Scenario::FitRates, c),
        Command::CheckConstants(c) => (Scenario::CheckConstants, c),
        Command::Resume { common, .. } => (Scenario::Simulate, common),
    };
    let config = RunConfig::load(scenario, &common.config, &common.set, common.out.as_deref())?;
    let manifest = match &cli.command {
        Command::Resume { snapshot, t_end, .. } => resume(&config, snapshot, *t_end)?,
        _ => run(&config)?,
    };
    eprintln!(
        "{}: {} in {:.2}s -> {}",
        manifest.scenario,
        if manifest.pass { "pass" } else { "FAIL" },
        manifest.wall_clock_secs,
        config.out_dir.display()
    );
    Ok(manifest.pass)
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

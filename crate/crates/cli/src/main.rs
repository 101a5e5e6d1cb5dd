use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pilotwave_cli::config::ScenarioConfig;
use pilotwave_cli::{run, CommandKind, Overrides};

#[derive(Parser)]
#[command(name = "pilotwave", version, about = "Semiclassical Bohmian trajectories and Husimi densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// WKB level table, optionally against the exact spectrum.
    Levels(Common),
    /// Envelope snapshots rho_plus, rho_minus, rho_bar.
    FigRho(Common),
    /// One trajectory in the local frozen-envelope field.
    FigTrajectory(Common),
    /// Phase-space grid, classical windows, limit and Bohm-limit checks.
    Husimi(Common),
    /// Ensemble transport and KS comparison with |psi|^2.
    Equivariance(Common),
    /// Invariant checks with a JSON report.
    PropertySuite(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Top-level seed; overrides spec.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Use the Numerov oracle; overrides analysis.oracle.
    #[arg(long, value_enum)]
    oracle: Option<Toggle>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (kind, common) = match cli.command {
        Command::Levels(c) => (CommandKind::Levels, c),
        Command::FigRho(c) => (CommandKind::FigRho, c),
        Command::FigTrajectory(c) => (CommandKind::FigTrajectory, c),
        Command::Husimi(c) => (CommandKind::Husimi, c),
        Command::Equivariance(c) => (CommandKind::Equivariance, c),
        Command::PropertySuite(c) => (CommandKind::PropertySuite, c),
    };
    let overrides = Overrides {
        out: common.out,
        seed: common.seed,
        oracle: common.oracle.map(|t| matches!(t, Toggle::On)),
    };
    let result = ScenarioConfig::load(&common.config).and_then(|config| run(kind, config, &overrides));
    match result {
        Ok(manifest) => {
            println!("manifest: {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

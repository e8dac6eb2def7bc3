use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paw_cli::{run, Command, RunOptions, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "paw",
    version,
    about = "Emergent-time clock and universe verifications"
)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Equally spaced clocks.
    Clock {
        #[command(subcommand)]
        action: ClockAction,
    },
    /// Rational-ratio clocks.
    Povm {
        #[command(subcommand)]
        action: PovmAction,
    },
    /// Clock-system universes.
    Universe {
        #[command(subcommand)]
        action: UniverseAction,
    },
    /// Entanglement growth inside the system.
    Arrow {
        #[command(subcommand)]
        action: ArrowAction,
    },
    /// Continuous-α checks.
    Continuum {
        #[command(subcommand)]
        action: ContinuumAction,
    },
}

#[derive(Subcommand)]
enum ClockAction {
    /// Orthonormality, identity, conjugacy and age-rate table.
    Verify(Common),
}

#[derive(Subcommand)]
enum PovmAction {
    /// Rationalization, POVM identity and delta sums.
    Verify(Common),
}

#[derive(Subcommand)]
enum UniverseAction {
    /// Relative states against unitary evolution.
    Evolve(Common),
    /// Conditional probabilities against the Born rule.
    Born(Common),
}

#[derive(Subcommand)]
enum ArrowAction {
    /// Observer entropy along the clock grid.
    Entropy(Common),
}

#[derive(Subcommand)]
enum ContinuumAction {
    /// Quadrature identity and derivative order.
    Check(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.group {
        Group::Clock {
            action: ClockAction::Verify(c),
        } => (Command::ClockVerify, c),
        Group::Povm {
            action: PovmAction::Verify(c),
        } => (Command::PovmVerify, c),
        Group::Universe {
            action: UniverseAction::Evolve(c),
        } => (Command::UniverseEvolve, c),
        Group::Universe {
            action: UniverseAction::Born(c),
        } => (Command::UniverseBorn, c),
        Group::Arrow {
            action: ArrowAction::Entropy(c),
        } => (Command::ArrowEntropy, c),
        Group::Continuum {
            action: ContinuumAction::Check(c),
        } => (Command::ContinuumCheck, c),
    };
    let seed = match std::env::var("PAW_SEED") {
        Ok(s) => match s.trim().parse() {
            Ok(v) => v,
            Err(_) => {
                eprintln!("error: PAW_SEED must be an unsigned integer, got {s:?}");
                return ExitCode::from(2);
            }
        },
        Err(_) => DEFAULT_SEED,
    };
    let options = RunOptions {
        tolerance_scale: common.tolerance_scale,
        seed,
    };
    match run(command, &common.config, &common.out, &options) {
        Ok(output) => {
            for a in &output.artifacts {
                println!("wrote {}", common.out.join(&a.name).display());
            }
            if output.passed() {
                println!("{}: all checks passed", command.name());
                ExitCode::SUCCESS
            } else {
                for c in output.failures() {
                    eprintln!("FAIL {} = {:e} ({:?})", c.name, c.value, c.bound);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! `ebath-lab`: deterministic scenario runner for the electron-in-photon-
//! bath numerics. Subcommands mirror the scenarios; the JSON summary goes
//! to stdout, bulk CSV tables to the output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ebath_lab::config::ScenarioConfig;
use ebath_lab::runner::{run, RunError};

#[derive(Parser)]
#[command(
    name = "ebath-lab",
    about = "Desk-scale scenarios for an electron in a thermal photon bath",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON scenario configuration; built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and summary.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config worker count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian packet spreading and the focused-packet width.
    Wavepacket(CommonArgs),
    /// Two-slit fringes, visibility and the detectability threshold.
    Twoslit(CommonArgs),
    /// Momentum relaxation by Compton collisions.
    Kinetics(CommonArgs),
    /// Infrared exponent integrals and asymptotic fits.
    Irkernel(CommonArgs),
    /// Tree-level field and Gauss-law diagnostics.
    Gausslaw(CommonArgs),
    /// Conversion constants and characteristic time scales.
    UnitsCheck(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Wavepacket(_) => "wavepacket",
            Command::Twoslit(_) => "twoslit",
            Command::Kinetics(_) => "kinetics",
            Command::Irkernel(_) => "irkernel",
            Command::Gausslaw(_) => "gausslaw",
            Command::UnitsCheck(_) => "units-check",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Wavepacket(a)
            | Command::Twoslit(a)
            | Command::Kinetics(a)
            | Command::Irkernel(a)
            | Command::Gausslaw(a)
            | Command::UnitsCheck(a) => a,
        }
    }
}

fn load_config(cmd: &Command) -> Result<ScenarioConfig, RunError> {
    let args = cmd.common();
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_json(&text).map_err(RunError::Validation)?
        }
        None => default_config(cmd)?,
    };
    if cfg.scenario.name() != cmd.name() {
        return Err(RunError::Validation(format!(
            "config is for scenario '{}' but subcommand is '{}'",
            cfg.scenario.name(),
            cmd.name()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    cfg.validate().map_err(RunError::Validation)?;
    Ok(cfg)
}

/// Built-in default configurations (natural units, electron mass scaled
/// to 1) so every subcommand runs out of the box.
fn default_config(cmd: &Command) -> Result<ScenarioConfig, RunError> {
    let json = match cmd {
        Command::UnitsCheck(_) => r#"{"scenario": "units-check"}"#,
        Command::Twoslit(_) => {
            r#"{
            "scenario": "twoslit",
            "physical": {"mass": {"value": 1.0}, "temperature": {"value": 0.02}, "lambda": {"value": 0.05}},
            "d": {"value": 6.0e6},
            "screen_distance": {"value": 7.0e8},
            "k": {"value": 0.1}
        }"#
        }
        Command::Wavepacket(_) => {
            r#"{
            "scenario": "wavepacket",
            "physical": {"mass": {"value": 1.0}, "temperature": {"value": 0.005}, "lambda": {"value": 0.05}},
            "l": {"value": 2000.0},
            "times": {"min": 0.0, "max": 4.0e6, "count": 41}
        }"#
        }
        Command::Kinetics(_) => {
            r#"{
            "scenario": "kinetics",
            "physical": {"mass": {"value": 1.0}, "temperature": {"value": 0.02}, "lambda": {"value": 0.21}},
            "initial": {"boltzmann": {"t_e": {"value": 0.04}}},
            "steps": 400
        }"#
        }
        Command::Irkernel(_) => {
            r#"{
            "scenario": "irkernel",
            "physical": {"mass": {"value": 1.0}, "temperature": {"value": 1.0e-4}, "lambda": {"value": 0.1}},
            "q": {"value": 0.0},
            "p": {"value": 1.0e-3},
            "mode": "full",
            "times": {"min": 1.0e5, "max": 1.0e6, "count": 16}
        }"#
        }
        Command::Gausslaw(_) => {
            r#"{
            "scenario": "gausslaw",
            "physical": {"mass": {"value": 1.0}, "temperature": {"value": 0.01}, "lambda": {"value": 0.1}},
            "source": {"gaussian": {"sigma": {"value": 1.0}}},
            "radii": [{"value": 20.0}, {"value": 40.0}],
            "times": {"min": 1.0, "max": 80.0, "count": 24},
            "include_noncov": false
        }"#
        }
    };
    ScenarioConfig::from_json(json).map_err(RunError::Validation)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.common().clone();
    let cfg = match load_config(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ebath-lab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match run(&cfg, &args.out) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ebath-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Argument parsing and config-file merging.
//!
//! Every experiment accepts the same flag set; values resolve in three
//! layers: command-line flag, then config document, then the per-command
//! default. The config document is plain JSON with the same field names as
//! the long flags (underscores instead of hyphens).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopode::analysis::DEFAULT_EPSILONS;
use serde::Deserialize;

use crate::run::{invalid, Failure};

#[derive(Parser)]
#[command(
    name = "coopode",
    version,
    about = "Numerical experiments on switched cooperative planar systems",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// One-row spectral summary of the period map at coupling c
    Analyze(Flags),
    /// The three instability thresholds with their bisection residuals
    Thresholds(Flags),
    /// Sweep c: multiplier, growth cone, and series lower bound per grid point
    Sweep(Flags),
    /// Sample a solution of the switched system from a given start state
    Trajectory(Flags),
    /// Integrate the induced flow on the unit circle
    Directions(Flags),
    /// Series partial sums with spectral lower bounds and tail bounds
    #[command(name = "peano-baker")]
    PeanoBaker(Flags),
    /// Audit the smoothed switching family against its perturbation bound
    Smooth(Flags),
    /// Compare the drift-perturbed solution against the periodic reference
    Nonperiodic(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Thresholds(_) => "thresholds",
            Command::Sweep(_) => "sweep",
            Command::Trajectory(_) => "trajectory",
            Command::Directions(_) => "directions",
            Command::PeanoBaker(_) => "peano-baker",
            Command::Smooth(_) => "smooth",
            Command::Nonperiodic(_) => "nonperiodic",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Analyze(f)
            | Command::Thresholds(f)
            | Command::Sweep(f)
            | Command::Trajectory(f)
            | Command::Directions(f)
            | Command::PeanoBaker(f)
            | Command::Smooth(f)
            | Command::Nonperiodic(f) => f,
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// JSON config document; explicit flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Coupling strength
    #[arg(long)]
    pub c: Option<f64>,
    /// Smoothing ramp width (smooth; omit to audit the default ladder)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Integrator step
    #[arg(long)]
    pub step: Option<f64>,
    /// Time horizon; whole periods for nonperiodic
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Series truncation order K (peano-baker)
    #[arg(long)]
    pub terms: Option<u32>,
    /// Bisection bracket width for threshold roots
    #[arg(long)]
    pub precision: Option<f64>,
    /// Lower end of the sweep grid
    #[arg(long)]
    pub c_min: Option<f64>,
    /// Upper end of the sweep grid
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Number of sweep grid points
    #[arg(long)]
    pub points: Option<u32>,
    /// Starting angle on the unit circle (directions)
    #[arg(long)]
    pub theta0: Option<f64>,
    /// First component of the start state (trajectory)
    #[arg(long)]
    pub x1: Option<f64>,
    /// Second component of the start state (trajectory)
    #[arg(long)]
    pub x2: Option<f64>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed recorded for reproducibility (no current command draws randomness)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// The config document mirror of [`Flags`]. Unknown keys are rejected so a
/// typo cannot silently fall back to a default.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    command: Option<String>,
    c: Option<f64>,
    epsilon: Option<f64>,
    step: Option<f64>,
    horizon: Option<f64>,
    terms: Option<u32>,
    precision: Option<f64>,
    c_min: Option<f64>,
    c_max: Option<f64>,
    points: Option<u32>,
    theta0: Option<f64>,
    x1: Option<f64>,
    x2: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
}

/// Fully resolved experiment parameters.
#[derive(Debug)]
pub struct Settings {
    pub c: f64,
    pub epsilons: Vec<f64>,
    pub step: f64,
    pub horizon: f64,
    pub terms: u32,
    pub precision: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub points: u32,
    pub theta0: f64,
    pub x1: f64,
    pub x2: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    #[allow(dead_code)] // part of the reproducibility contract, see --seed
    pub seed: u64,
}

pub fn resolve(command: &Command) -> Result<Settings, Failure> {
    let flags = command.flags();
    let doc = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<ConfigDoc>(&text)
                .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?
        }
        None => ConfigDoc::default(),
    };
    if let Some(named) = &doc.command {
        if named != command.name() {
            return Err(invalid(
                "command",
                format!(
                    "config document names `{named}` but `{}` was invoked",
                    command.name()
                ),
            ));
        }
    }
    // A horizon measured in time units for trajectories, in whole periods
    // for the non-periodic comparison.
    let default_horizon = match command {
        Command::Directions(_) => 50.0,
        Command::Nonperiodic(_) => 25.0,
        _ => 20.0,
    };
    let epsilons = match flags.epsilon.or(doc.epsilon) {
        Some(e) => vec![e],
        None => DEFAULT_EPSILONS.to_vec(),
    };
    Ok(Settings {
        c: flags.c.or(doc.c).unwrap_or(3.0),
        epsilons,
        step: flags.step.or(doc.step).unwrap_or(1e-3),
        horizon: flags.horizon.or(doc.horizon).unwrap_or(default_horizon),
        terms: flags.terms.or(doc.terms).unwrap_or(40),
        precision: flags.precision.or(doc.precision).unwrap_or(1e-10),
        c_min: flags.c_min.or(doc.c_min).unwrap_or(0.5),
        c_max: flags.c_max.or(doc.c_max).unwrap_or(8.0),
        points: flags.points.or(doc.points).unwrap_or(16),
        theta0: flags.theta0.or(doc.theta0).unwrap_or(0.0),
        x1: flags.x1.or(doc.x1).unwrap_or(1.0),
        x2: flags.x2.or(doc.x2).unwrap_or(1.0),
        out: flags.out.clone().or(doc.out),
        format: flags.format.or(doc.format).unwrap_or(Format::Csv),
        seed: flags.seed.or(doc.seed).unwrap_or(0),
    })
}

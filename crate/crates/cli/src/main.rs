//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical
//! failure, 3 I/O error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pushpull_core::{Error, ErrorKind, Scheme};

#[derive(Debug, Parser)]
#[command(name = "pushpull", version, about = "Cavity-atom memory loading: push-pull vs on-off")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for CSV/SVG output.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Frequency-grid points (odd).
    #[arg(long, global = true, value_name = "N")]
    pub grid_points: Option<usize>,
    /// Relative tolerance of the time integrator.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol: Option<f64>,
    /// Seed for random draws in `check`.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone, Default)]
pub struct PointArgs {
    /// Preset to start from (see `preset list`).
    #[arg(long)]
    pub preset: Option<String>,
    /// push-pull or on-off.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Cooperativity; defaults to C_pi.
    #[arg(long)]
    pub cooperativity: Option<f64>,
    /// Cavity loss rate; defaults to the first configured value.
    #[arg(long)]
    pub kappa_j: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reflection spectra and phases at one cooperativity.
    Reflectivity {
        #[command(flatten)]
        point: PointArgs,
        /// Use a plotting grid with this many points instead of the photon grid.
        #[arg(long)]
        plot_points: Option<usize>,
    },
    /// Time-domain amplitudes for a Gaussian input pulse.
    Dynamics {
        #[command(flatten)]
        point: PointArgs,
        /// Ground state the atom starts in (1 or 2).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        state: u8,
        /// Integrate the model with an explicit decay channel of this rate.
        #[arg(long)]
        kappa_q: Option<f64>,
    },
    /// Herald probability, conditional states and fidelities for one photon state.
    Loading {
        #[command(flatten)]
        point: PointArgs,
        /// Polar angle of the photon polarization on the Bloch sphere.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
        chi: f64,
        /// Azimuthal angle of the photon polarization.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Averaged fidelity and heralding probability along a cooperativity sweep.
    Sweep {
        /// Preset to start from (see `preset list`)
        #[arg(long)]
        preset: Option<String>,
    },
    /// Averaged fidelity and heralding probability versus photon bandwidth.
    Bandwidth {
        /// Preset to start from (see `preset list`)
        #[arg(long)]
        preset: Option<String>,
    },
    /// Peak excited-state population for a short pulse (kappa = g = 1).
    Population {
        /// Atomic decay rate in units of kappa
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        /// Pulse duration in units of 1/kappa
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
    },
    /// Stored parameter sets.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Random spot checks of the loading invariants.
    Check {
        /// Number of random photon states and parameter sets
        #[arg(long, default_value_t = 200)]
        draws: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetAction {
    List,
    Show { name: String },
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Config => 1,
        ErrorKind::Numerical => 2,
        ErrorKind::Io => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or usage
//! error, 3 metric degeneration during a flow.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::error::GeometryError;

pub use config::{FamilySpec, FileConfig, OutputFormat, RunConfig};
pub use output::{Cell, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PSEUDOFLOW_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Geometry(GeometryError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Geometry(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Geometry(GeometryError::Degeneration { .. }) => 3,
            CliError::Config(_) | CliError::Geometry(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pseudoflow", version, about = "Levi-Civita connections along metric flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Christoffel symbols Γ^k_ij of the Levi-Civita connection.
    Christoffel(CommonArgs),
    /// Ricci tensor and scalar curvature.
    Curvature(CommonArgs),
    /// Pseudoconnection induced by R(g): coefficients and principal part.
    Pseudoconn(CommonArgs),
    /// Integrate the metric flow and export the trajectory.
    Flow(CommonArgs),
    /// Run the verification suite on a family.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// flat-torus, sphere2, sphere3, hyperbolic2, s2xs2, wrong-sphere2,
    /// warped-sphere2 or conformal-torus.
    #[arg(long)]
    pub family: Option<String>,
    /// ricci, minus2ricci, scale:<λ> or zero.
    #[arg(long)]
    pub map: Option<String>,
    /// Central-difference step in t.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Flow end time.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; defaults to the output directory, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// csv or summary.
    #[arg(long)]
    pub format: Option<String>,
    /// Comma-separated chart coordinates; defaults to the sample points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Time at which pointwise quantities are evaluated.
    #[arg(long, allow_hyphen_values = true)]
    pub time: Option<f64>,
    /// Lattice points per axis for conformal-torus.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Comma-separated initial block coefficients.
    #[arg(long, value_delimiter = ',')]
    pub initial: Option<Vec<f64>>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            family: self.family.clone(),
            map: self.map.clone(),
            dt: self.dt,
            step: self.step,
            horizon: self.horizon,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format.clone(),
            point: self.point.clone(),
            time: self.time,
            grid: self.grid,
            initial: self.initial.clone(),
        };
        RunConfig::from_file_config(file.overridden_by(flags), self.out_dir.clone())
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Christoffel(a) => commands::christoffel(&a.resolve()?),
        Command::Curvature(a) => commands::curvature(&a.resolve()?),
        Command::Pseudoconn(a) => commands::pseudoconn(&a.resolve()?),
        Command::Flow(a) => commands::flow(&a.resolve()?),
        Command::Verify(a) => commands::verify(&a.resolve()?),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

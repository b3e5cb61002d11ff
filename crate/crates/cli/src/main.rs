//! `adsmass`: charges, positivity checks and invariant suites from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit statuses.
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "adsmass",
    version,
    about = "Global charges and energy-momentum of AdS-asymptotically hyperbolic initial data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the charges, the energy-momentum, Q and its positivity verdicts.
    Charges(ChargesArgs),
    /// Run the seeded invariant suites.
    Verify(VerifyArgs),
    /// Reduce an energy-momentum to its orbit representative.
    Normalize(NormalizeArgs),
    /// Sample the dominant energy condition.
    Deccheck(DecCheckArgs),
    /// Sample a family onto a grid file.
    ExportGrid(ExportGridArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// exact_hyperbolic, schwarzschild_ads, gaussian_perturbation or grid.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter as key=value (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Grid file; shorthand for `--family grid --param path=<FILE>`.
    #[arg(long, value_name = "FILE")]
    pub grid: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ChargesArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated increasing radii.
    #[arg(long, default_value = "4,5,6,7,8")]
    pub schedule: String,
    /// Relative convergence tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = adsmass::quadrature::DEFAULT_POLAR_NODES)]
    pub polar_nodes: usize,
    #[arg(long, default_value_t = adsmass::quadrature::DEFAULT_AZIMUTH_NODES)]
    pub azimuth_nodes: usize,
    /// Also evaluate the last radius with doubled quadrature orders.
    #[arg(long)]
    pub check_quadrature: bool,
    /// Sampled points for the DEC verdict.
    #[arg(long, default_value_t = 100)]
    pub dec_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// tr k̆ on an inner boundary.
    #[arg(long, requires = "boundary_k_nu")]
    pub boundary_tr_k: Option<f64>,
    /// k(ν) on an inner boundary, n comma-separated components in an orthonormal frame.
    #[arg(long, requires = "boundary_tr_k")]
    pub boundary_k_nu: Option<String>,
    /// Report path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples for identity suites.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Samples for the oracle sweeps.
    #[arg(long, default_value_t = 10_000)]
    pub sweep_samples: usize,
    /// Run only the named suite (repeatable).
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Test hook: perturb Θ by this relative amount.
    #[arg(long, hide = true)]
    pub corrupt_theta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    /// Mass vector m0,m1,m2,m3 with M = Λ(m).
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    /// Ξ as n1,n2,n3,r1,r2,r3, or as the Λ-components of N and R (8 values, zero time parts).
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecCheckArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inner radius of the sampling shell (default: just outside the data domain).
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long, default_value_t = 8.0)]
    pub r_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportGridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated uniformly spaced radii.
    #[arg(long)]
    pub radii: String,
    #[arg(long, default_value_t = 24)]
    pub n_theta: usize,
    #[arg(long, default_value_t = 32)]
    pub n_phi: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Charges(a) => commands::charges(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Normalize(a) => commands::normalize(&a),
        Command::Deccheck(a) => commands::deccheck(&a),
        Command::ExportGrid(a) => commands::export_grid(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

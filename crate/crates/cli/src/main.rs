//! `delta-shells`: bound states of concentric δ-shell potentials from the
//! command line.
//!
//! Results are JSON objects with a fixed key order; curves are CSV. Every
//! artifact carries a run manifest, so rerunning with the same inputs gives
//! the same bytes.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{report_failure, Failure, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "delta-shells", version, about = "Spectra of concentric delta-shell potentials")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Global {
    /// Shell configuration JSON file, or `-` for stdin
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Highest angular momentum channel to scan
    #[arg(long, global = true)]
    pub ell_max: Option<usize>,
    /// Upper end of the decay-rate scan
    #[arg(long, global = true)]
    pub kappa_max: Option<f64>,
    /// Number of scan points
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Relative tolerance on refined decay rates
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for parallel sweeps
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All bound states, sorted by energy
    Spectrum,
    /// Tabulate the secular functions of one channel as CSV
    Scan(ScanArgs),
    /// Tunnelling splitting of a tuned two-shell pair against separation
    #[command(allow_negative_numbers = true)]
    Splitting(SplittingArgs),
    /// Zero-energy analysis of one channel
    Threshold(ThresholdArgs),
    /// Dimensionless couplings from physical interface data
    #[command(allow_negative_numbers = true)]
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0)]
    pub ell: usize,
    #[arg(long)]
    pub kappa_min: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SplittingArgs {
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 3.0)]
    pub d_min: f64,
    #[arg(long, default_value_t = 12.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 10)]
    pub d_steps: usize,
    /// Also write (d, gap, predicted_gap, ratio) rows here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Representative material set (type1-cdse-zns, type2-cdte-cdse)
    #[arg(long, conflicts_with_all = ["delta_v_ev", "width_nm", "mass_ratio", "inner_alpha", "radii_nm"])]
    pub preset: Option<String>,
    /// Band offset across the outer interface
    #[arg(long)]
    pub delta_v_ev: Option<f64>,
    /// Interface width
    #[arg(long)]
    pub width_nm: Option<f64>,
    /// Effective mass over the free electron mass
    #[arg(long)]
    pub mass_ratio: Option<f64>,
    /// Length unit
    #[arg(long, default_value_t = 1.0)]
    pub l0_nm: f64,
    /// Dimensionless coupling of the inner shell
    #[arg(long)]
    pub inner_alpha: Option<f64>,
    /// Inner and outer radius, comma separated
    #[arg(long, value_delimiter = ',')]
    pub radii_nm: Option<Vec<f64>>,
}

fn run(cli: &Cli, manifest: &mut RunManifest) -> Result<u8, Failure> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input("Threads", e.to_string()))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Spectrum => commands::spectrum(g, manifest),
        Command::Scan(a) => commands::scan(g, a, manifest),
        Command::Splitting(a) => commands::splitting(g, a, manifest),
        Command::Threshold(a) => commands::threshold(g, a, manifest),
        Command::Calibrate(a) => commands::calibrate_dot(g, a, manifest),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match cli.command {
        Command::Spectrum => "spectrum",
        Command::Scan(_) => "scan",
        Command::Splitting(_) => "splitting",
        Command::Threshold(_) => "threshold",
        Command::Calibrate(_) => "calibrate",
    };
    let mut manifest = RunManifest::new(name);
    manifest.threads = cli.global.threads;
    match run(&cli, &mut manifest) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            report_failure(&manifest, &failure);
            ExitCode::from(failure.code)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gpcond::cli::{run_file, Overrides};

/// Gaussian process conditioning experiments driven by a config file.
///
/// Exit codes: 0 on success, 2 when a refine/contract run finishes without
/// meeting its tolerances (the report is still written), 1 on errors.
#[derive(Parser)]
#[command(name = "gpcond", version, about)]
struct Args {
    /// Path to the experiment config (flat `key = value` lines).
    config: PathBuf,

    /// Override the relative eigenvalue cutoff of the pseudoinverse.
    #[arg(long = "pinv-tol", value_name = "X")]
    pinv_tol: Option<f64>,

    /// Override the random seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Override the output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        pinv_tol: args.pinv_tol,
        seed: args.seed,
        out: args.out,
    };
    match run_file(&args.config, &overrides) {
        Ok(outcome) => ExitCode::from(outcome.exit_code as u8),
        Err(e) => {
            eprintln!("gpcond: {e}");
            ExitCode::from(1)
        }
    }
}

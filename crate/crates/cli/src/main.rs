mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubic_core::Error;
use output::Format;

/// Counting cubic fields through monic cubic polynomials of bounded root height.
#[derive(Parser, Debug)]
#[command(name = "cubic", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for Monte-Carlo estimates.
    #[arg(long, global = true, default_value_t = cubic_core::archimedean::DEFAULT_SEED)]
    pub seed: u64,
    /// Cap on the number of coefficient triples an enumeration may scan.
    #[arg(long, global = true, default_value_t = cubic_core::poly::DEFAULT_BOX_BUDGET)]
    pub budget: u128,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List monic cubics of height below Y, optionally within a discriminant window.
    Enumerate {
        #[arg(long)]
        y: f64,
        /// Keep |disc| < X.
        #[arg(long)]
        x: Option<f64>,
        /// Also compute the index and field discriminant of each irreducible cubic.
        #[arg(long)]
        index: bool,
    },
    /// Cubic fields with |disc| < X, with signed counts.
    Census {
        #[arg(long)]
        x: f64,
        #[arg(long = "c-const", default_value_t = cubic_core::census::DEFAULT_C)]
        c: f64,
        /// Census cache file; defaults to $CUBIC_CACHE_DIR/census-C<c>.txt when that is set.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Local densities nu(Sigma_{p^l}) and sigma(n).
    Densities {
        #[arg(long = "p-max", default_value_t = 13)]
        p_max: u64,
        #[arg(long, default_value_t = 3)]
        level: u32,
    },
    /// Local masses, truncated index moments and the Euler product.
    Masses {
        #[arg(long = "p-max", default_value_t = 10_000)]
        p_max: u64,
        #[arg(long, default_value_t = 4)]
        level: u32,
    },
    /// Predicted constants per degree and signature.
    Constants {
        #[arg(long = "p-max", default_value_t = 10_000)]
        p_max: u64,
        /// Largest degree reported.
        #[arg(long, default_value_t = 5)]
        degree: u32,
    },
    /// Volumes of height regions and of the trace-zero slices.
    Volumes {
        #[arg(long)]
        y: f64,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = cubic_core::archimedean::DEFAULT_MC_SAMPLES)]
        samples: u64,
    },
    /// Truncated inclusion-exclusion sieve report.
    Sieve {
        #[arg(long)]
        x: f64,
        #[arg(long = "c-const", default_value_t = cubic_core::census::DEFAULT_C)]
        c: f64,
        #[arg(long, default_value_t = cubic_core::sieve::DEFAULT_KAPPA)]
        kappa: f64,
        #[arg(long, default_value_t = cubic_core::sieve::DEFAULT_DELTA1)]
        delta1: f64,
        #[arg(long, default_value_t = cubic_core::sieve::DEFAULT_DELTA2)]
        delta2: f64,
        /// Sum over every (n, d).
        #[arg(long)]
        untruncated: bool,
    },
    /// Run the acceptance checks.
    Verify {
        /// Skip the slow checks.
        #[arg(long)]
        quick: bool,
        /// Run only these checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 2,
        Error::Precision(_) => 3,
        Error::Config(_) => 4,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Overflow(_) => "overflow",
        Error::ZeroDiscriminant => "zero_discriminant",
        Error::Reducible { .. } => "reducible",
        Error::Budget { .. } => "budget",
        Error::Factorization { .. } => "factorization",
        Error::Precision(_) => "precision",
        Error::Unsupported(_) => "unsupported",
        Error::Config(_) => "config",
        Error::Cache(_) => "cache",
        Error::Io(_) => "io",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let doc = serde_json::json!({ "error": error_kind(&e), "message": e.to_string() });
            eprintln!("{doc}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! Command-line front end: parses flags, loads a weight config, runs one
//! solver and prints JSON or CSV.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use capstan::ErrorKind;

pub use output::round12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] capstan::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    /// 0 success, 1 validation, 2 solver failure, 3 certificate integrity failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 1,
                ErrorKind::Solver => 2,
                ErrorKind::Certificate => 3,
            },
            CliError::Usage(_) | CliError::Io(..) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "capstan", version, about = "Weighted equilibrium measures, capacities and prime-sum bounds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Weight config JSON: {"interval":[a,b],"factors":[{"coeffs":[..],"exponent":e}]}
    #[arg(long, global = true)]
    pub weight: Option<PathBuf>,
    /// Write the main output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps and Fekete runs.
    #[arg(long, global = true, env = "CAPSTAN_JOBS")]
    pub jobs: Option<usize>,
    /// Diagnostics on standard error (repeat for more).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Grid size of the discrete seed for support detection.
    #[arg(long, global = true, default_value_t = 400)]
    pub grid_size: usize,
    /// Newton residual tolerance for the endpoint system.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub newton_tol: f64,
    /// Largest endpoint residual accepted as a solution.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub accept_tol: f64,
    /// Relative mass below which a grid point of the seed counts as empty.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub mass_threshold: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted capacity c_w, energy V_w and the constant F_w.
    Capacity,
    /// Support endpoints of the equilibrium measure.
    Support,
    /// Equilibrium density sampled on the support, as CSV.
    Density {
        /// Number of equally spaced sample points on [a, b].
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Bound coefficient B(w) for a weight on [0, 1].
    Bound,
    /// Maximize B over the factor exponents.
    Optimize {
        /// Golden-section over one exponent shared by all factors, `lo:hi`.
        #[arg(long, value_parser = parse_range)]
        tied: Option<(f64, f64)>,
        /// Bracket length at which the tied search stops.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Tied-exponent sweep `t0:t1:steps` (steps = number of points).
        #[arg(long, value_parser = parse_sweep, requires = "csv")]
        sweep: Option<(f64, f64, usize)>,
        /// Destination of the sweep CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sieve, psi and the ratio I(x) / (x^2 / 2) against a coefficient.
    PsiCheck {
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        /// Coefficient the ratio is compared against.
        #[arg(long)]
        coefficient: f64,
        /// Smallest x of the ratio check (default: limit / 100).
        #[arg(long)]
        x_min: Option<u64>,
        /// Row spacing of the CSV (default: limit / 1000).
        #[arg(long)]
        stride: Option<u64>,
        /// Check psi(n) = log lcm(1..n) exactly for n up to this.
        #[arg(long, default_value_t = 2000)]
        verify_lcm: u64,
    },
    /// Weighted Fekete points and d_n for n = 2..=nmax, as CSV.
    Fekete {
        #[arg(long, default_value_t = 20)]
        nmax: usize,
    },
    /// Exact integrality certificate for n points (2 <= n <= 4).
    Certify {
        #[arg(long)]
        n: usize,
        /// Cap on the number of monomials in the expansion.
        #[arg(long, default_value_t = capstan::fekete::DEFAULT_TERM_BUDGET)]
        budget: usize,
    },
    /// Density from harmonic measures against the direct formula.
    CrossCheck,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b] => {
            let lo: f64 = a.parse().map_err(|e| format!("{a}: {e}"))?;
            let hi: f64 = b.parse().map_err(|e| format!("{b}: {e}"))?;
            if lo.is_finite() && hi.is_finite() && lo < hi {
                Ok((lo, hi))
            } else {
                Err(format!("expected lo < hi, got {s}"))
            }
        }
        _ => Err(format!("expected lo:hi, got {s}")),
    }
}

fn parse_sweep(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let t0: f64 = a.parse().map_err(|e| format!("{a}: {e}"))?;
            let t1: f64 = b.parse().map_err(|e| format!("{b}: {e}"))?;
            let steps: usize = n.parse().map_err(|e| format!("{n}: {e}"))?;
            if !(t0.is_finite() && t1.is_finite()) || steps == 0 {
                return Err(format!("bad sweep {s}"));
            }
            Ok((t0, t1, steps))
        }
        _ => Err(format!("expected t0:t1:steps, got {s}")),
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("capstan: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::Core(capstan::Error::Invalid("x".into())).exit_code(), 1);
        assert_eq!(CliError::Core(capstan::Error::SingularMomentSystem).exit_code(), 2);
        assert_eq!(CliError::Core(capstan::Error::NonIntegerCertificate("x".into())).exit_code(), 3);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0.05:0.5"), Ok((0.05, 0.5)));
        assert!(parse_range("0.5:0.05").is_err());
        assert_eq!(parse_sweep("0:1:11"), Ok((0.0, 1.0, 11)));
        assert!(parse_sweep("0:1").is_err());
        assert!(parse_sweep("0:1:0").is_err());
    }
}

//! Batch front end: parameter conversion, point evaluation, coefficient
//! dumps, eigenvalue scans, orthogonality integrals, and a self-check suite.
//!
//! Exit codes: 1 usage, 2 bad input file, 3 numerical failure, 4 self-check
//! failure.

mod cmd;
mod io;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use cmd::{CmdError, ContourSpec};

#[derive(Parser)]
#[command(
    name = "symheun",
    about = "General Heun functions through the symmetric four-point representation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ContourArgs {
    /// 1-based index of the starting singular point
    #[arg(long, default_value_t = 4)]
    from: usize,
    /// 1-based index of the ending singular point
    #[arg(long, default_value_t = 1)]
    to: usize,
    /// Interior waypoints as `re,im` (repeatable); defaults to z = 1
    #[arg(long, value_name = "RE,IM")]
    via: Vec<String>,
    /// Detachment offset from each endpoint, in [1e-4, 1e-2]
    #[arg(long, default_value_t = 2e-4)]
    offset: f64,
}

impl ContourArgs {
    fn build(&self) -> Result<ContourSpec, String> {
        let via = if self.via.is_empty() {
            vec![num_complex::Complex64::new(1.0, 0.0)]
        } else {
            self.via
                .iter()
                .map(|s| io::parse_complex(s))
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(ContourSpec {
            from: self.from,
            to: self.to,
            via,
            offset: self.offset,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a parameter file (standard, symmetric, or canonical) to
    /// canonical form, reporting phi, chi, lambda, the generator chain, and
    /// circularity
    Convert {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate F, F', tail, and residual at each point of a CSV file,
    /// selecting Taylor, Laurent, or integration by |z|
    Eval {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Integration tolerance for the annulus region
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Series truncation order
        #[arg(long, default_value_t = 600)]
        max_terms: usize,
        /// Initial value f_0 as `re,im`
        #[arg(long, default_value = "1,0")]
        f0: String,
        /// Initial derivative f_1 as `re,im`
        #[arg(long, default_value = "0,0")]
        f1: String,
        /// Reserved for reproducibility of randomized options
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump Taylor coefficients f_0..f_N for one or both engines
    Series {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_terms: usize,
        /// paper | oracle | both
        #[arg(long, default_value = "both")]
        engine: String,
        #[arg(long, default_value = "1,0")]
        f0: String,
        #[arg(long, default_value = "0,0")]
        f1: String,
    },
    /// Dump the inverted-parameter series backing the Laurent companion
    Laurent {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_terms: usize,
        /// paper | oracle | both
        #[arg(long, default_value = "oracle")]
        engine: String,
        #[arg(long, default_value = "1,0")]
        f0: String,
        #[arg(long, default_value = "0,0")]
        f1: String,
    },
    /// Scan a real-lambda interval for eigenvalues of the two-point problem
    Eigen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: f64,
        /// Grid resolution of the seeding scan
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = 2)]
        count: usize,
        #[command(flatten)]
        contour: ContourArgs,
    },
    /// Pairwise orthogonality integrals for a list of lambda values
    Ortho {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Semicolon-separated list of `re,im` values
        #[arg(long, allow_hyphen_values = true)]
        lambdas: String,
        /// Quadrature refinement tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        contour: ContourArgs,
    },
    /// Run the invariant self-check suite (exit 4 on failure)
    Check {
        /// Reserved for reproducibility of randomized options
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dispatch(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Convert { params, out } => cmd::convert(&params, &out),
        Command::Eval {
            params,
            points,
            out,
            tol,
            max_terms,
            f0,
            f1,
            seed: _,
        } => {
            let f0 = io::parse_complex(&f0).map_err(CmdError::BadInput)?;
            let f1 = io::parse_complex(&f1).map_err(CmdError::BadInput)?;
            cmd::eval(&params, &points, &out, tol, max_terms, f0, f1)
        }
        Command::Series {
            params,
            out,
            max_terms,
            engine,
            f0,
            f1,
        } => {
            let f0 = io::parse_complex(&f0).map_err(CmdError::BadInput)?;
            let f1 = io::parse_complex(&f1).map_err(CmdError::BadInput)?;
            cmd::series(&params, &out, max_terms, &engine, f0, f1)
        }
        Command::Laurent {
            params,
            out,
            max_terms,
            engine,
            f0,
            f1,
        } => {
            let f0 = io::parse_complex(&f0).map_err(CmdError::BadInput)?;
            let f1 = io::parse_complex(&f1).map_err(CmdError::BadInput)?;
            cmd::laurent(&params, &out, max_terms, &engine, f0, f1)
        }
        Command::Eigen {
            params,
            out,
            lambda_min,
            lambda_max,
            step,
            count,
            contour,
        } => {
            let spec = contour.build().map_err(CmdError::BadInput)?;
            cmd::eigen(&params, &out, lambda_min, lambda_max, step, count, &spec)
        }
        Command::Ortho {
            params,
            out,
            lambdas,
            tol,
            contour,
        } => {
            let spec = contour.build().map_err(CmdError::BadInput)?;
            let lambdas = lambdas
                .split(';')
                .map(io::parse_complex)
                .collect::<Result<Vec<_>, _>>()
                .map_err(CmdError::BadInput)?;
            cmd::ortho(&params, &out, &lambdas, &spec, tol)
        }
        Command::Check { seed: _ } => cmd::check(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CmdError::CheckFailed(n)) => {
            eprintln!("error: {n} check(s) failed");
            ExitCode::from(4)
        }
    }
}

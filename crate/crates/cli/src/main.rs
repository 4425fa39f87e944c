//! `supersmooth` command-line front end.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use supersmooth::characterize::{CheckOptions, DEFAULT_CHECK_TOL};
use supersmooth::error::Error;
use supersmooth::gindex::MAX_GENERATORS;
use supersmooth::superfield::DerivativeMethod;
use supersmooth::suite::Mode;
use supersmooth::supernumber::Skeleton;

/// Grassmann superalgebras, Grassmann continuation and checks of supersmooth functions.
///
/// Inputs are JSON files (`-` reads stdin). Results are printed to stdout;
/// `--out` also writes them as JSON. Exit status: 0 when every check passes,
/// 1 when a check fails or a function cannot be evaluated, 2 on usage or
/// parse errors.
#[derive(Parser, Debug)]
#[command(name = "supersmooth", version)]
struct Cli {
    #[command(flatten)]
    config: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Number of generators L; the default skeleton for bare scalars and sampled points.
    #[arg(long, global = true, value_name = "L")]
    skeleton: Option<u32>,
    /// Degree cutoff D (defaults to L).
    #[arg(long, global = true, value_name = "D")]
    cutoff: Option<u32>,
    /// Scalar mode.
    #[arg(long, global = true, default_value = "exact", value_parser = ["exact", "float"])]
    mode: String,
    /// Float-mode tolerance on the largest defect coefficient.
    #[arg(long, global = true, default_value_t = DEFAULT_CHECK_TOL)]
    tol: f64,
    /// Central-difference step for float-mode derivatives (default 1e-5).
    #[arg(long = "fd-step", global = true, value_name = "H")]
    fd_step: Option<f64>,
    /// Largest number of coordinates checked per slot.
    #[arg(long = "coord-cap", global = true, value_name = "N")]
    coord_cap: Option<usize>,
    /// Seed of every randomized choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Comma-separated sections of the standard suite
    /// (equivalence, fixtures, sigma, dual, annihilator, projectability).
    #[arg(long, global = true, value_delimiter = ',')]
    suite: Vec<String>,
    /// Write the result as JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Product of supernumbers, left to right.
    Mul { inputs: Vec<PathBuf> },
    /// Sum of supernumbers.
    Add { inputs: Vec<PathBuf> },
    /// Metric distance of X, or of X - Y when two inputs are given.
    Dist { x: PathBuf, y: Option<PathBuf> },
    /// Projection of a supernumber onto the skeleton given by --skeleton.
    Project { x: PathBuf },
    /// Grassmann continuation of a function at even supernumber arguments.
    Continue { function: PathBuf, point: PathBuf },
    /// Coordinate or directional derivative of a function at a point.
    Derive {
        function: PathBuf,
        point: PathBuf,
        /// Coordinate `A:[I]`, e.g. `2:[1,3]` or `1:[]`.
        #[arg(long, conflicts_with = "direction")]
        coord: Option<String>,
        /// Direction point file for a Gateaux derivative.
        #[arg(long)]
        direction: Option<PathBuf>,
    },
    /// Taylor partial sum of a superfield at X in direction Y, compared with its value at X + Y.
    Taylor {
        superfield: PathBuf,
        point: PathBuf,
        direction: PathBuf,
        /// Order N of the partial sum (defaults to the polynomial degree, else 3).
        #[arg(long)]
        order: Option<u32>,
    },
    /// Superfield coefficients of a function at the even part of a point.
    Extract { function: PathBuf, point: PathBuf },
    /// Cauchy-Riemann check at one point or an array of points.
    CrCheck { function: PathBuf, points: PathBuf },
    /// Recover the witnesses F_A of superdifferentiability at a point.
    Witness { function: PathBuf, point: PathBuf },
    /// Solve A_i = σ_i F for F from an array of L supernumbers.
    SolveSigma { family: PathBuf },
    /// Represent an even-linear map on odd supernumbers as right multiplication.
    Dual { map: PathBuf },
    /// Equivalence suite on a function, or the standard suite when no function is given.
    Suite {
        function: Option<PathBuf>,
        /// Points to check; sampled from --seed when omitted.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Number of sampled points.
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
}

/// Validated run settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub skeleton: Option<Skeleton>,
    pub mode: Mode,
    pub check: CheckOptions,
    pub seed: u64,
    pub sections: Vec<String>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Result<Self, Error> {
        let skeleton = match (a.skeleton, a.cutoff) {
            (Some(l), d) => {
                if l > MAX_GENERATORS {
                    return Err(Error::Config(format!("--skeleton {l} exceeds the limit of {MAX_GENERATORS} generators")));
                }
                Some(Skeleton::new(l, d.unwrap_or(l))?)
            }
            (None, Some(_)) => return Err(Error::Config("--cutoff needs --skeleton".into())),
            (None, None) => None,
        };
        let mode: Mode = a.mode.parse()?;
        if mode == Mode::Float && (a.tol.is_nan() || a.tol <= 0.0) {
            return Err(Error::Config("--tol must be positive in float mode".into()));
        }
        if let Some(h) = a.fd_step {
            if h.is_nan() || h <= 0.0 {
                return Err(Error::Config("--fd-step must be positive".into()));
            }
        }
        let method = a.fd_step.map(|h| DerivativeMethod::CentralDifference { h, richardson: false });
        let method = if mode == Mode::Float { method } else { None };
        Ok(RunConfig {
            skeleton,
            mode,
            check: CheckOptions { method, tol: a.tol, coord_cap: a.coord_cap },
            seed: a.seed,
            sections: a.suite.clone(),
            out: a.out.clone(),
        })
    }
}

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Eval(_) | Error::Consistency(_) => 1,
        Error::Parse(_) | Error::Config(_) | Error::Skeleton(_) | Error::Domain(_) => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = RunConfig::from_args(&cli.config).and_then(|cfg| commands::run(&cli.command, &cfg));
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

//! `parasharp`: tables and reports for the derivative estimate of the
//! semilinear heat equation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parasharp_core::{InitialDataSpec, NonlinearitySpec};

/// Exit status for bad flags or out-of-domain parameters.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit status when a solver or quadrature fails.
pub const EXIT_SOLVER: u8 = 3;
/// Exit status when output cannot be written.
pub const EXIT_IO: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "parasharp", version, about = "Derivative estimates and their sharpness for u_t - u_xx = f(u)")]
pub struct Cli {
    /// Write the main table here instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self-similar profile w_p by shooting on w'(0).
    Profile(ProfileArgs),
    /// Closed-form phi(p) for one or more exponents.
    Phi(PhiArgs),
    /// The limit profile w0, its derivative and its ODE residual on a grid.
    S0(S0Args),
    /// Mild solution by fixed-point iteration of the Duhamel formula.
    MildSolve(MildArgs),
    /// Compare |u_x(.,t)| with F_t over a set of times.
    VerifyEstimate(VerifyArgs),
    /// Gap w_p'(0) - phi(p) along p = 1/(2n), n = 1, 2, 4, ...
    GapSweep(SweepArgs),
    /// Scaled self-similar solution with |u_x(.,T)| close to alpha + 1.
    Construct(ConstructArgs),
    /// Quadrature rules and special functions.
    Specfun(SpecfunArgs),
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Exponent p in (0, 1).
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 12.0)]
    pub eta_max: f64,
    /// Final width of the slope bracket.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    /// Comma-separated exponents in (0, 1).
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub p: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct S0Args {
    /// Grid as start:step:stop.
    #[arg(long, default_value = "0:0.5:4")]
    pub grid: String,
}

/// Discretization flags shared by the field-based subcommands.
#[derive(Debug, Args)]
pub struct GridArgs {
    /// Final time T.
    #[arg(long = "T", value_name = "T")]
    pub t_final: f64,
    /// Half-width of the x domain [default: 8 sqrt(T) + 4].
    #[arg(long)]
    pub x_half: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub dx: f64,
    /// Number of time steps on the graded grid t_k = T (k/N)^2.
    #[arg(long, default_value_t = 64)]
    pub nt: usize,
}

#[derive(Debug, Args)]
pub struct MildArgs {
    /// Nonlinearity: zero | const:C | linear:A | power:P | scaled-power:C:P
    #[arg(long)]
    pub f: NonlinearitySpec,
    /// Initial data: zero | sin:A:K | w0:L | table:PATH
    #[arg(long)]
    pub u0: InitialDataSpec,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 40)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Times at which u_x is written to --derivative-output [default: T].
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<f64>,
    /// CSV file for the derivative slices.
    #[arg(long, value_name = "PATH")]
    pub derivative_output: Option<PathBuf>,
    /// Print the Duhamel residual of the result to standard error.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub f: NonlinearitySpec,
    #[arg(long)]
    pub u0: InitialDataSpec,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Threshold for the flag |u_x(.,T)| >= alpha.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Report times [default: 16 geometric points in [T/4, T]].
    #[arg(long, value_delimiter = ',')]
    pub times: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
    pub t_final: f64,
    /// Right end of the window [0, X] for the distances to w0.
    #[arg(long = "X", value_name = "X", default_value_t = 6.0)]
    pub window: f64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
    pub t_final: f64,
    /// The exponent is p = 1/(2n).
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct SpecfunArgs {
    #[command(subcommand)]
    pub command: SpecfunCommand,
}

#[derive(Debug, Subcommand)]
pub enum SpecfunCommand {
    /// Gauss-Hermite nodes and weights.
    DumpGh {
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Gauss-Legendre nodes and weights on [-1, 1].
    DumpGl {
        #[arg(long, default_value_t = 32)]
        order: usize,
    },
    /// Evaluate a special function at comma-separated points.
    Eval {
        #[arg(long = "fn", value_enum)]
        function: SpecialFunction,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        x: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecialFunction {
    Gamma,
    LnGamma,
    Erf,
    Erfc,
    /// I(eta) = int_eta^inf e^{-s^2/4} / (2 + s^2)^2 ds
    TailI,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("PARASHARP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("PARASHARP_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot size the worker pool: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

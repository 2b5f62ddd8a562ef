//! Batch command-line front end for the resonance solver.
//!
//! Subcommands: solve a single mode, sweep an m-range, validate the spectral
//! pipeline against the closed-form determinants, print asymptotic starting
//! values, and export mode/opnorm/signmap data for plotting.
//!
//! Exit codes: 0 success, 2 non-convergence or evaluation failure, 3
//! configuration error.

mod output;
mod run;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "wgm", version, about = "Whispering-gallery-mode resonances of radially layered disks")]
struct Cli {
    /// Worker threads for sweeps (fallback: WGM_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ProfileArgs {
    /// Catalog profile name (constant-1.5, constant-5, affine-1..5,
    /// parabolic-1..3, luneburg, luneburg-n2-affine, luneburg-n2-cubic).
    #[arg(long, conflicts_with = "profile_json")]
    profile: Option<String>,

    /// Profile literal, e.g. {"xi":0.5,"inner":{"poly":[2.5,-2.8]},"outer":{"poly":[1.0]}}
    #[arg(long)]
    profile_json: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative-residual stopping threshold.
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,

    /// Iteration cap.
    #[arg(long, default_value_t = 2000)]
    lmax: usize,

    /// Spectral solver tolerance.
    #[arg(long, default_value_t = 1e-12)]
    bvp_tol: f64,

    /// Starting value: the interface formula, the asymptotic expansion, or
    /// an explicit `value:<float>`.
    #[arg(long, default_value = "formula")]
    start: String,

    /// Solve this intermediate catalog profile first and seed the target
    /// solve with its root.
    #[arg(long)]
    homotopy: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton solve for a single azimuthal order.
    Solve {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Newton solves over an m-range (inclusive, e.g. 1..60), parallel.
    Sweep {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Range lo..hi, inclusive.
        #[arg(long)]
        m_range: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Numeric vs closed-form Newton runs from a list of real starts
    /// (piecewise-constant and luneburg profiles only).
    Validate {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        m: usize,
        /// Integer start range lo..hi, inclusive.
        #[arg(long, default_value = "1..20")]
        k0_range: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form asymptotic quasi-resonances.
    Asympt {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Single order...
        #[arg(long, conflicts_with = "m_range")]
        m: Option<usize>,
        /// ...or a range lo..hi.
        #[arg(long)]
        m_range: Option<String>,
        /// Radial number of the expansion.
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Radial mode export: (r, region, re_u, im_u) plus optional polar grid.
    Mode {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        m: usize,
        /// Field kind: the exact mode at a complex resonance or the real-k
        /// scattering solution.
        #[arg(long, value_enum, default_value_t = ModeKind::Exact)]
        kind: ModeKind,
        /// Resonance to evaluate at (solved from scratch when omitted).
        #[arg(long, requires = "k_im")]
        k_re: Option<f64>,
        #[arg(long, requires = "k_re")]
        k_im: Option<f64>,
        #[arg(long, value_enum, default_value_t = Norm::Value)]
        normalization: Norm,
        /// Polar-grid export path (r, theta, Re[u e^{im theta}]).
        #[arg(long)]
        polar_out: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// ||T^{-1}(k)||_2 over a real-k grid: (m, k, invnorm).
    Opnorm {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Comma-separated list of orders.
        #[arg(long)]
        m_list: String,
        #[arg(long)]
        k_min: f64,
        #[arg(long)]
        k_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1e-10)]
        bvp_tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sign of Im(ddet/det) over a complex-k rectangle: (re_k, im_k, sign).
    Signmap {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
        #[arg(long, default_value_t = 1.5)]
        n1: f64,
        #[arg(long, default_value_t = 1.0)]
        n2: f64,
        #[arg(long, value_enum, default_value_t = Variant::Det1)]
        variant: Variant,
        #[arg(long, default_value_t = 0.0)]
        re_min: f64,
        #[arg(long, default_value_t = 100.0)]
        re_max: f64,
        #[arg(long, default_value_t = 0.0)]
        im_min: f64,
        #[arg(long, default_value_t = 40.0)]
        im_max: f64,
        #[arg(long, default_value_t = 50)]
        n_re: usize,
        #[arg(long, default_value_t = 25)]
        n_im: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
enum ModeKind {
    Exact,
    Quasi,
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
enum Norm {
    Value,
    Derivative,
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
enum Variant {
    Det1,
    Det2,
    Detscal,
}

/// Failure modes mapped onto exit codes.
pub enum CliError {
    /// Bad configuration: exit 3.
    Config(String),
    /// Evaluation or convergence failure: exit 2.
    Run(String),
}

impl From<wgm_core::Error> for CliError {
    fn from(e: wgm_core::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successful exits; anything else is a usage
            // problem and maps to the config exit code.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };

    let threads = cli
        .threads
        .or_else(|| std::env::var("WGM_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(t) = threads {
        if t == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(3);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    match run::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

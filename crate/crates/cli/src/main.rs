//! `stablecov`: dependence measures and memory classification from the
//! command line. Output is CSV (17 significant digits) or JSON on stdout or
//! `--out`. Exit status is 0 on success, 2 for invalid input and 1 for a
//! numerical failure.

mod commands;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Output};

const FILTER_HELP: &str = "filter: explicit:1,0.5,-0.25 | geom:base=2[,scale=s] | \
hyper:beta=1.2[,sign=const|alt][,c0=zsum|<value>][,scale=s]";

#[derive(Parser, Debug)]
#[command(name = "stablecov", version, about = "Dependence and memory of symmetric alpha-stable models")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Base seed; replication r uses seed + r
    #[arg(long, global = true, env = "STABLECOV_SEED")]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dependence of (X_0, X_n) for a linear process over a lag range
    ProcessDeps {
        #[arg(long)]
        alpha: f64,
        #[arg(long, help = FILTER_HELP)]
        filter: String,
        /// Lags, `a:b` inclusive or a comma list
        #[arg(long, default_value = "0:32")]
        lags: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Alpha-covariance and alpha-correlation of a linear field
    FieldDeps {
        #[arg(long)]
        alpha: f64,
        /// Row factor of a product filter c_{i,j} = a_i b_j
        #[arg(long, help = FILTER_HELP, requires = "filter_b", conflicts_with = "matrix")]
        filter_a: Option<String>,
        #[arg(long, requires = "filter_a")]
        filter_b: Option<String>,
        /// Explicit coefficients, rows separated by `;`
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value = "0:4")]
        n_lags: String,
        #[arg(long, default_value = "0:4")]
        m_lags: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Closed-form Ornstein-Uhlenbeck dependence on a time grid
    Ou {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Memory class from exact partial-sum scales
    MemoryExact {
        #[arg(long)]
        alpha: f64,
        #[arg(long, help = FILTER_HELP)]
        filter: String,
        /// Powers of two in `lo:hi`, or a comma list
        #[arg(long, default_value = "64:16384")]
        grid: String,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
    },
    /// Memory class from simulated partial sums (median of |S_n|)
    MemorySim {
        #[arg(long)]
        alpha: f64,
        #[arg(long, help = FILTER_HELP)]
        filter: String,
        #[arg(long, value_enum, default_value_t = Law::Sas)]
        law: Law,
        /// Pareto scale
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value = "64:2048")]
        grid: String,
        #[arg(long, default_value_t = 400)]
        reps: usize,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
    },
    /// Directional memory of a product-filter field
    MemoryField {
        #[arg(long)]
        alpha: f64,
        #[arg(long, help = FILTER_HELP)]
        filter_a: String,
        #[arg(long)]
        filter_b: String,
        #[arg(long, default_value = "64:16384")]
        grid_n: String,
        #[arg(long, default_value = "64:16384")]
        grid_m: String,
        #[arg(long, default_value_t = 0.05)]
        band: f64,
    },
    /// Tail-based spectral measure estimate from bivariate samples
    SpectralEstimate {
        /// CSV with two numeric columns (a header line is skipped)
        #[arg(long)]
        input: PathBuf,
        /// Number of upper order statistics (default floor(n^0.6))
        #[arg(long)]
        k: Option<usize>,
    },
    /// Q-covariance of a Lévy measure
    Qcov {
        /// Atoms `x1,x2,mass;...`
        #[arg(long, conflicts_with = "spectral")]
        atoms: Option<String>,
        /// Spectral CSV of the angular part of a polar stable Lévy measure
        #[arg(long)]
        spectral: Option<PathBuf>,
        /// Radial cells for the discretization check
        #[arg(long, default_value_t = 5000)]
        radial: usize,
    },
    /// Exploratory runs with no pass/fail meaning
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Law {
    Sas,
    Gaussian,
    Pareto,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Decay of rho_n for zero-sum hyperbolic filters
    ZeroSumDecay {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "const")]
        sign: String,
        #[arg(long, default_value = "64:4096")]
        grid: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Partial-sum growth of a zero-sum filter |c_k| = k^{-beta} with
    /// periodic signs
    SignPattern {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Periodic signs of c_1, c_2, ..., e.g. `+-` or `++-`
        #[arg(long)]
        signs: String,
        /// Number of coefficients kept
        #[arg(long, default_value_t = 1 << 16)]
        length: usize,
        #[arg(long, default_value = "64:4096")]
        grid: String,
    },
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let seed = cli.global.seed.unwrap_or(1);
    match &cli.command {
        Command::ProcessDeps { alpha, filter, lags, tol } => commands::process_deps(*alpha, filter, lags, *tol),
        Command::FieldDeps {
            alpha,
            filter_a,
            filter_b,
            matrix,
            n_lags,
            m_lags,
            tol,
        } => commands::field_deps(
            *alpha,
            filter_a.as_deref(),
            filter_b.as_deref(),
            matrix.as_deref(),
            n_lags,
            m_lags,
            *tol,
        ),
        Command::Ou { alpha, lambda, tmax, steps } => commands::ou(*alpha, *lambda, *tmax, *steps),
        Command::MemoryExact { alpha, filter, grid, band } => commands::memory_exact(*alpha, filter, grid, *band),
        Command::MemorySim {
            alpha,
            filter,
            law,
            scale,
            grid,
            reps,
            band,
        } => commands::memory_sim(*alpha, filter, *law, *scale, grid, *reps, seed, *band),
        Command::MemoryField {
            alpha,
            filter_a,
            filter_b,
            grid_n,
            grid_m,
            band,
        } => commands::memory_field(*alpha, filter_a, filter_b, grid_n, grid_m, *band),
        Command::SpectralEstimate { input, k } => commands::spectral_estimate(input, *k),
        Command::Qcov { atoms, spectral, radial } => commands::qcov(atoms.as_deref(), spectral.as_deref(), *radial),
        Command::Experiment { which } => match which {
            Experiment::ZeroSumDecay {
                alpha,
                beta,
                sign,
                grid,
                tol,
            } => commands::zero_sum_decay(*alpha, *beta, sign, grid, *tol),
            Experiment::SignPattern {
                alpha,
                beta,
                signs,
                length,
                grid,
            } => commands::sign_pattern(*alpha, *beta, signs, *length, grid),
        },
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(stablecov::Error::InvalidParameter {
                name: "threads",
                reason: "must be positive".into(),
            }
            .into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Output(std::io::Error::other(e)))?;
    }
    let output = dispatch(cli)?;
    match &cli.global.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(CliError::Output)?;
            let mut w = std::io::BufWriter::new(file);
            output.write(&mut w, cli.global.format)?;
            w.flush().map_err(CliError::Output)
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            output.write(&mut w, cli.global.format)?;
            w.flush().map_err(CliError::Output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

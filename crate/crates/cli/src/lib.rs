//! Command-line front end: experiment presets, CSV/JSON output and the
//! invariant-suite runner.

mod commands;
mod config;
mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{merge_config, parse_config};
pub use output::{Format, Table};

/// Environment variable capping internal parallelism.
pub const THREADS_ENV: &str = "SPECDECAY_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] specdecay::Error),
    #[error("{0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 usage, 3 certificate or verification failure, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        use specdecay::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::Certificate(_) => 3,
                E::NonConvergence { .. } => 4,
                E::Parse(_) | E::Parameter(_) | E::Precision(_) | E::Domain(_) | E::Dimension(_) => 2,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "specdecay", version, about = "Singular numbers of truncated composition operators")]
pub struct Cli {
    /// Flat key=value file; keys are long flag names, flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Working precision in bits.
    #[arg(long, default_value_t = 512)]
    pub bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximation numbers of a truncated composition operator.
    Spectrum {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "hardy")]
        space: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Restrict to functions vanishing at 0 (drop index 0).
        #[arg(long)]
        hyperplane: bool,
        /// Order of the extended table used for the truncation tail
        /// (default 2N; 0 skips the tail).
        #[arg(long)]
        tail_order: Option<usize>,
        /// Also write the matrix, one `re,im` token per entry.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Product-chain comparison of spectra across nested spaces, listed
    /// from the largest weight down.
    Compare {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "dirichlet:0.5,hardy,bergman:0")]
        spaces: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fit decay models to a computed spectrum.
    Decay {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "hardy")]
        space: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// `all` or a comma list of n_over_log_n, sqrt_n, geometric.
        #[arg(long, default_value = "all")]
        models: String,
        /// `lo:hi` (1-based); default 8 to the certified length.
        #[arg(long)]
        fit_range: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Two-Carleson function of the pull-back measure.
    Carleson {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "0.1,0.05,0.025,0.0125")]
        h_grid: String,
        #[arg(long, default_value_t = 64)]
        xi_count: usize,
        /// Uniform grid level (2^k x 2^k cells).
        #[arg(long, default_value_t = 10)]
        k: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Luecking level sums over Hastings–Luecking boxes.
    Schatten {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 10)]
        k: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Reproducing kernels: closed form against the defining series.
    Kernels {
        /// hardy, bergman or dirichlet (the closed-form normalisation).
        #[arg(long, default_value = "dirichlet")]
        space: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// `a:z` pairs separated by commas; random points when absent.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Taylor coefficients of a symbol.
    Taylor {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suites; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dirichlet spectrum by two routes: direct, and as a weighted
    /// composition operator on the Bergman space.
    TwoRoutes {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Leading singular values compared.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Runs one invocation and returns the process exit code. Usage errors
/// print the usage text; all diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::apply_config_file(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match with_thread_cap(|| commands::execute(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn with_thread_cap<R: Send>(f: impl FnOnce() -> CliResult<R> + Send) -> CliResult<R> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return f();
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    if threads == 0 {
        return Err(CliError::Usage(format!("{THREADS_ENV} must be positive")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
    pool.install(f)
}

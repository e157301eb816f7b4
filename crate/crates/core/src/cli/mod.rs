//! Command-line front end.
//!
//! Every command prints a key=value report on stdout. Data artifacts
//! (vectors, views, transcripts, logs) go to `--out-dir`, default the current
//! directory; with an explicit `--out-dir` the report and a sorted JSON
//! summary are written there too. Exit statuses: 0 when every check passes,
//! 1 on a failed check, 2 on usage, parse or precondition errors, 3 when the
//! run is refused (enumeration space too large, restart or query cap hit).

pub mod commands;
pub mod config;
pub mod files;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::refresh::DEFAULT_RESTART_CAP;

pub use commands::CommandOutput;
pub use config::{RunConfig, FORMAT_VERSION};
pub use report::{Report, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lrs", version, about = "Inner-product leakage-resilient storage toolkit")]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, env = "LRS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel experiments; 1 runs fully serially.
    #[arg(long, global = true, env = "LRS_THREADS")]
    pub threads: Option<usize>,
    /// Allow p < 4n (tiny enumeration instances).
    #[arg(long, global = true)]
    pub relaxed: bool,
    /// Maximum number of refresh restarts before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_RESTART_CAP)]
    pub restart_cap: u32,
    /// Directory for output artifacts.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    /// Rejection for small fields, constructive otherwise.
    Auto,
    Rejection,
    Constructive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a secret into share files L.vec and R.vec.
    Encode {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        secret: u64,
        #[arg(long, value_enum, default_value_t = Sampler::Auto)]
        sampler: Sampler,
    },
    /// Print the secret stored in a pair of share files.
    Decode {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Run the refresh protocol on a pair of share files.
    Refresh {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Oracle tuples to use instead of fresh samples, one per attempt.
        #[arg(long)]
        force_oracle: Option<PathBuf>,
    },
    /// Rebuild both views from old and new shares without interaction.
    Reconstruct {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        new_left: PathBuf,
        #[arg(long)]
        new_right: PathBuf,
        /// `V` and `V~`, from a cr file or a left/right view file; sampled
        /// when absent.
        #[arg(long)]
        cr: Option<PathBuf>,
    },
    /// Compare real and reconstructed refresh distributions.
    #[command(name = "verify-lemma2")]
    VerifyLemma2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// Check every nonzero-coordinate input pair.
        #[arg(long, conflicts_with_all = ["left", "right"])]
        exhaustive_inputs: bool,
        #[arg(long, requires = "right")]
        left: Option<PathBuf>,
        #[arg(long, requires = "left")]
        right: Option<PathBuf>,
        /// Compare sampled histograms instead of exact distributions.
        #[arg(long)]
        monte_carlo: bool,
        /// Samples per histogram in Monte Carlo mode.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Estimate the per-attempt restart probability.
    #[command(name = "restart-rate")]
    RestartRate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Measure operation counts against the dimension.
    Bench {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Include wall-clock times (makes the output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Play the leakage game against a scripted adversary.
    Game {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// Per-part bit budget; defaults to the bound suggested for (p, n).
        #[arg(long)]
        lambda: Option<usize>,
        /// `PART/DESCRIPTOR;...`, e.g. `0/bit-select:0,2;1/parity:0,1`.
        #[arg(long)]
        adversary: String,
        /// Secret to encode; sampled when absent.
        #[arg(long, conflicts_with_all = ["left", "right"])]
        secret: Option<u64>,
        #[arg(long, requires = "right")]
        left: Option<PathBuf>,
        #[arg(long, requires = "left")]
        right: Option<PathBuf>,
        #[arg(long, default_value_t = crate::leakage::DEFAULT_QUERY_CAP)]
        max_queries: usize,
    },
}

/// Exit status for an error that ended the command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SpaceTooLarge { .. }
        | Error::RestartCapExceeded { .. }
        | Error::QueryCapExceeded { .. } => EXIT_REFUSED,
        _ => EXIT_USAGE,
    }
}

/// Errors of the command layer: library errors plus file I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) | CliError::File { source: e, .. } => exit_code(e),
            CliError::Io { .. } => EXIT_USAGE,
        }
    }
}

fn write_outputs(cli: &Cli, out: &CommandOutput) -> Result<(), CliError> {
    let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let io = |path: &PathBuf, source| CliError::Io {
        path: path.clone(),
        source,
    };
    if !out.files.is_empty() || cli.out_dir.is_some() {
        std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
    }
    let mut files: Vec<(String, String)> = out.files.clone();
    if cli.out_dir.is_some() {
        files.push(("report.txt".into(), out.report.text()));
        files.push(("summary.json".into(), out.report.summary_json()));
    }
    for (name, content) in files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::execute(cli)),
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot start {t} threads: {e}");
                return EXIT_USAGE;
            }
        },
        None => commands::execute(cli),
    };
    match result.and_then(|out| write_outputs(cli, &out).map(|_| out)) {
        Ok(out) => {
            let _ = stdout.write_all(out.report.text().as_bytes());
            if out.passed {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

//! Command-line front end for the corpus mining toolchain.
//!
//! `search` discovers repositories and writes a manifest, `run` fetches
//! and scans them into a SQLite store, and the remaining subcommands
//! (`stats`, `pairs`, `homogeneity`, `groups`, `export`) analyze the
//! store and write CSV plus plot-friendly output files.

mod commands;
pub mod config;
mod lock;
mod pipeline;

pub use config::{FileConfig, PipelineConfig};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use mpi_recon_core::collectives::CollectivesError;
use mpi_recon_core::corpus::CorpusError;
use mpi_recon_core::patterns::PatternError;
use mpi_recon_core::report::ReportError;
use mpi_recon_core::scanner::ScanError;
use mpi_recon_core::store::StoreError;

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad flags, bad config file, or inconsistent settings. Exit 1.
    #[error("{0}")]
    Config(String),
    /// The database is locked by another run. Exit 2.
    #[error("{0}")]
    Lock(String),
    /// A runtime precondition failed (missing database and the like).
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Collectives(#[from] CollectivesError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io {
            context: context.into(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mpi-recon",
    version,
    about = "Mine MPI collective call sites from open-source repositories",
    after_help = "Environment:\n  MPIRECON_TOKEN  API token for repository search \
                  (GITHUB_TOKEN is the fallback)\n\nExit codes:\n  \
                  0 success, 1 usage or configuration error, 2 runtime failure"
)]
pub struct Cli {
    /// TOML config file (default: ./mpi-recon.toml when present)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log detail on stderr (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discover repositories via code search and write the manifest
    Search(SearchArgs),
    /// Fetch, scan, and ingest every manifest entry into the database
    Run(RunArgs),
    /// Occurrence counts per collective
    Stats(StatsArgs),
    /// Pair co-occurrence sweep and fusion ratios over epsilon
    Pairs(PairsArgs),
    /// Homogeneous vs mixed distribution of adjacent call pairs
    Homogeneity(HomogeneityArgs),
    /// Detect repeated collective groups within files
    Groups(GroupsArgs),
    /// Export the store tables as CSV
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Where to write the manifest (JSON Lines)
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// Collective keywords to search for, comma separated
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub keywords: Option<Vec<String>>,
    /// Language filters (C, C++, Fortran), comma separated
    #[arg(long, value_delimiter = ',', value_name = "LANGS")]
    pub languages: Option<Vec<String>>,
    /// Cap results per (keyword, language) query; 0 writes an empty manifest
    #[arg(long, value_name = "N")]
    pub max_results: Option<usize>,
    /// Results per page, 1..=100
    #[arg(long, value_name = "N")]
    pub per_page: Option<usize>,
    /// Search API base URL
    #[arg(long, value_name = "URL")]
    pub api_base_url: Option<String>,
    /// Query template; `{keyword}` and `{language}` are substituted
    #[arg(long, value_name = "TEMPLATE")]
    pub query_template: Option<String>,
    /// Retries per request after rate-limit rejections
    #[arg(long, value_name = "N")]
    pub retry_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Manifest to ingest
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// SQLite database path (created when missing)
    #[arg(long, value_name = "FILE")]
    pub db: Option<PathBuf>,
    /// Directory for extracted source trees
    #[arg(long, value_name = "DIR")]
    pub workdir: Option<PathBuf>,
    /// Extraction budget in bytes per fetch wave
    #[arg(long, value_name = "BYTES")]
    pub budget_bytes: Option<u64>,
    /// Archive URL template with {owner}, {name}, {rev} placeholders
    #[arg(long, value_name = "TEMPLATE")]
    pub archive_template: Option<String>,
    /// Also write every file and call-site record as JSON Lines
    #[arg(long, value_name = "FILE")]
    pub emit_scan: Option<PathBuf>,
    /// Where to write the scan log (default: <out-dir>/scan.log)
    #[arg(long, value_name = "FILE")]
    pub scan_log: Option<PathBuf>,
    /// Output directory (for the default scan log location)
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// SQLite database path
    #[arg(long, value_name = "FILE")]
    pub db: Option<PathBuf>,
    /// Directory for report files
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// SQLite database path
    #[arg(long, value_name = "FILE")]
    pub db: Option<PathBuf>,
    /// Directory for report files
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Pairs to analyze, like Gather:Scatter, comma separated
    #[arg(long, value_delimiter = ',', value_name = "A:B,...")]
    pub pairs: Option<Vec<String>>,
    /// Epsilon values (line distances), comma separated
    #[arg(long = "eps", alias = "epsilons", value_delimiter = ',', value_name = "N,...")]
    pub epsilons: Option<Vec<u32>>,
}

#[derive(Debug, Args)]
pub struct HomogeneityArgs {
    /// SQLite database path
    #[arg(long, value_name = "FILE")]
    pub db: Option<PathBuf>,
    /// Directory for report files
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Pairs to analyze, like Gather:Scatter, comma separated
    #[arg(long, value_delimiter = ',', value_name = "A:B,...")]
    pub pairs: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct GroupsArgs {
    /// SQLite database path
    #[arg(long, value_name = "FILE")]
    pub db: Option<PathBuf>,
    /// Directory for report files
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Collectives eligible for grouping (default: all)
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub names: Option<Vec<String>>,
    /// Max line span within a group, or `none` for unbounded
    #[arg(long, value_name = "N|none")]
    pub epsilon: Option<String>,
    /// Minimum group size (at least 2)
    #[arg(long, value_name = "N")]
    pub delta: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// SQLite database path
    #[arg(long, value_name = "FILE")]
    pub db: Option<PathBuf>,
    /// Directory for the CSV files
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Which table to export
    #[arg(long, value_enum, default_value_t = TableChoice::All)]
    pub table: TableChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    Metadata,
    Collectives,
    All,
}

/// Parse arguments and run. Returns the process exit code: 0 success,
/// 1 usage or configuration error, 2 runtime failure.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout and exit 0; real usage
            // errors go to stderr and exit 1.
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    init_logging(cli.verbose);
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            err.exit_code()
        }
    }
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

fn execute(cli: Cli) -> Result<(), AppError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => {
            let default_path = Path::new(config::DEFAULT_CONFIG_FILE);
            if default_path.is_file() {
                FileConfig::load(default_path)?
            } else {
                FileConfig::default()
            }
        }
    };
    let cfg = PipelineConfig::resolve(file)?;
    match &cli.command {
        Command::Search(args) => commands::search(&cfg, args),
        Command::Run(args) => commands::run(&cfg, args),
        Command::Stats(args) => commands::stats(&cfg, args),
        Command::Pairs(args) => commands::pairs(&cfg, args),
        Command::Homogeneity(args) => commands::homogeneity(&cfg, args),
        Command::Groups(args) => commands::groups(&cfg, args),
        Command::Export(args) => commands::export(&cfg, args),
    }
}

//! Configuration: built-in defaults, the optional TOML file layer, and
//! validation. Command-line flags override file values, which override
//! the defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use mpi_recon_core::collectives::{DEFAULT_COLLECTIVES, DEFAULT_SEARCH_KEYWORDS};
use mpi_recon_core::corpus::LanguageFilter;
use mpi_recon_core::CollectiveSet;

use crate::AppError;

/// Config file picked up from the working directory when `--config` is
/// not given.
pub const DEFAULT_CONFIG_FILE: &str = "mpi-recon.toml";

pub const DEFAULT_DB: &str = "mpi-recon.db";
pub const DEFAULT_WORKDIR: &str = "corpus-work";
pub const DEFAULT_OUT_DIR: &str = "reports";
pub const DEFAULT_MANIFEST: &str = "manifest.jsonl";
pub const DEFAULT_BYTE_BUDGET: u64 = 1 << 30;
pub const DEFAULT_API_BASE_URL: &str = "https://api.github.com";
pub const DEFAULT_MAX_RESULTS: usize = 1000;
pub const DEFAULT_PER_PAGE: usize = 100;
pub const DEFAULT_DELTA: usize = 2;
pub const DEFAULT_GROUP_EPSILON: u32 = 50;
pub const DEFAULT_RETRY_MAX: u32 = 5;
pub const DEFAULT_EPSILONS: [u32; 7] = [0, 5, 10, 20, 30, 50, 100];

/// Pairs reported by `pairs` and `homogeneity` unless overridden.
pub const DEFAULT_PAIRS: [(&str, &str); 6] = [
    ("Gather", "Scatter"),
    ("Allreduce", "Allgather"),
    ("Allreduce", "Alltoall"),
    ("Reduce", "Bcast"),
    ("Gatherv", "Gather"),
    ("Scatterv", "Scatter"),
];

const DEFAULT_LANGUAGES: [LanguageFilter; 3] = [
    LanguageFilter::C,
    LanguageFilter::Cpp,
    LanguageFilter::Fortran,
];

/// The TOML file layer. Every key is optional; unknown keys are
/// rejected so typos surface instead of silently using a default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub db: Option<PathBuf>,
    pub workdir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub byte_budget: Option<u64>,
    pub api_base_url: Option<String>,
    /// Search expression with `{keyword}` and `{language}` placeholders.
    pub query_template: Option<String>,
    /// Archive URL with `{owner}`, `{name}`, and `{rev}` placeholders.
    pub archive_template: Option<String>,
    pub keywords: Option<Vec<String>>,
    /// Language filters: `C`, `C++` (or `cpp`), `Fortran`.
    pub languages: Option<Vec<String>>,
    pub max_results: Option<usize>,
    pub per_page: Option<usize>,
    /// Collective base names recognized after the `MPI_` prefix.
    pub collectives: Option<Vec<String>>,
    /// Extra whole-identifier tokens counted as a collective, as
    /// `[token, collective]` pairs.
    pub aliases: Option<Vec<(String, String)>>,
    pub pairs: Option<Vec<(String, String)>>,
    pub epsilons: Option<Vec<u32>>,
    pub delta: Option<usize>,
    pub group_epsilon: Option<u32>,
    pub retry_max: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            AppError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| AppError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub db: PathBuf,
    pub workdir: PathBuf,
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
    pub byte_budget: u64,
    pub api_base_url: String,
    pub query_template: Option<String>,
    pub archive_template: Option<String>,
    pub keywords: Vec<String>,
    pub languages: Vec<LanguageFilter>,
    pub max_results: usize,
    pub per_page: usize,
    pub set: CollectiveSet,
    pub pairs: Vec<(String, String)>,
    /// Sweep epsilons, ascending and unique.
    pub epsilons: Vec<u32>,
    pub delta: usize,
    pub group_epsilon: Option<u32>,
    pub retry_max: u32,
}

impl PipelineConfig {
    pub fn resolve(file: FileConfig) -> Result<Self, AppError> {
        let collectives = file
            .collectives
            .unwrap_or_else(|| DEFAULT_COLLECTIVES.iter().map(|s| s.to_string()).collect());
        let set = CollectiveSet::with_aliases(collectives, file.aliases.unwrap_or_default())
            .map_err(|e| AppError::Config(format!("collectives: {e}")))?;

        let keywords = canonicalize_names(
            &set,
            &file
                .keywords
                .unwrap_or_else(|| DEFAULT_SEARCH_KEYWORDS.iter().map(|s| s.to_string()).collect()),
            "search keyword",
        )?;
        if keywords.is_empty() {
            return Err(AppError::Config(
                "at least one search keyword is required".to_string(),
            ));
        }

        let languages = match file.languages {
            None => DEFAULT_LANGUAGES.to_vec(),
            Some(raw) => parse_languages(&raw)?,
        };

        let byte_budget = file.byte_budget.unwrap_or(DEFAULT_BYTE_BUDGET);
        if byte_budget == 0 {
            return Err(AppError::Config(
                "byte_budget must be greater than zero".to_string(),
            ));
        }

        let per_page = file.per_page.unwrap_or(DEFAULT_PER_PAGE);
        if per_page == 0 || per_page > 100 {
            return Err(AppError::Config(format!(
                "per_page must be between 1 and 100, got {per_page}"
            )));
        }

        let mut epsilons = file.epsilons.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
        if epsilons.is_empty() {
            return Err(AppError::Config(
                "epsilons must contain at least one value".to_string(),
            ));
        }
        epsilons.sort_unstable();
        epsilons.dedup();

        let delta = file.delta.unwrap_or(DEFAULT_DELTA);
        if delta < 2 {
            return Err(AppError::Config(format!(
                "delta must be at least 2, got {delta}"
            )));
        }

        let pairs = match file.pairs {
            None => DEFAULT_PAIRS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            Some(raw) => raw
                .iter()
                .map(|(a, b)| canonical_pair(&set, a, b))
                .collect::<Result<Vec<_>, _>>()?,
        };

        Ok(PipelineConfig {
            db: file.db.unwrap_or_else(|| PathBuf::from(DEFAULT_DB)),
            workdir: file.workdir.unwrap_or_else(|| PathBuf::from(DEFAULT_WORKDIR)),
            out_dir: file.out_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            manifest: file.manifest.unwrap_or_else(|| PathBuf::from(DEFAULT_MANIFEST)),
            byte_budget,
            api_base_url: file
                .api_base_url
                .unwrap_or_else(|| DEFAULT_API_BASE_URL.to_string()),
            query_template: file.query_template,
            archive_template: file.archive_template,
            keywords,
            languages,
            max_results: file.max_results.unwrap_or(DEFAULT_MAX_RESULTS),
            per_page,
            set,
            pairs,
            epsilons,
            delta,
            group_epsilon: Some(file.group_epsilon.unwrap_or(DEFAULT_GROUP_EPSILON)),
            retry_max: file.retry_max.unwrap_or(DEFAULT_RETRY_MAX),
        })
    }
}

/// Resolve each name against the set (case-insensitively), keeping the
/// canonical spelling and first-occurrence order.
pub fn canonicalize_names(
    set: &CollectiveSet,
    names: &[String],
    what: &str,
) -> Result<Vec<String>, AppError> {
    let mut canonical = Vec::with_capacity(names.len());
    for name in names {
        match set.resolve(name) {
            Some(resolved) => {
                if !canonical.iter().any(|n| n == resolved) {
                    canonical.push(resolved.to_string());
                }
            }
            None => {
                return Err(AppError::Config(format!(
                    "{what} `{name}` is not a known collective (known: {})",
                    set.names().join(", ")
                )))
            }
        }
    }
    Ok(canonical)
}

fn canonical_pair(
    set: &CollectiveSet,
    a: &str,
    b: &str,
) -> Result<(String, String), AppError> {
    let resolve = |name: &str| {
        set.resolve(name).map(str::to_string).ok_or_else(|| {
            AppError::Config(format!(
                "pair member `{name}` is not a known collective (known: {})",
                set.names().join(", ")
            ))
        })
    };
    let a = resolve(a)?;
    let b = resolve(b)?;
    if a == b {
        return Err(AppError::Config(format!(
            "pair `{a}:{b}` names the same collective twice"
        )));
    }
    Ok((a, b))
}

fn parse_languages(raw: &[String]) -> Result<Vec<LanguageFilter>, AppError> {
    if raw.is_empty() {
        return Err(AppError::Config(
            "at least one language filter is required".to_string(),
        ));
    }
    let mut languages = Vec::new();
    for text in raw {
        let language = LanguageFilter::parse(text).ok_or_else(|| {
            AppError::Config(format!(
                "unknown language `{text}` (expected C, C++, or Fortran)"
            ))
        })?;
        if !languages.contains(&language) {
            languages.push(language);
        }
    }
    Ok(languages)
}

/// Parse `A:B` pair arguments from the command line.
pub fn parse_pair_specs(
    set: &CollectiveSet,
    specs: &[String],
) -> Result<Vec<(String, String)>, AppError> {
    specs
        .iter()
        .map(|spec| {
            let (a, b) = spec.split_once(':').ok_or_else(|| {
                AppError::Config(format!(
                    "pair `{spec}` must look like `Gather:Scatter`"
                ))
            })?;
            canonical_pair(set, a.trim(), b.trim())
        })
        .collect()
}

/// Parse the `--epsilon` argument of the groups command: a line count,
/// or `none` for an unbounded span.
pub fn parse_group_epsilon(text: &str) -> Result<Option<u32>, AppError> {
    if text.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    text.parse::<u32>().map(Some).map_err(|_| {
        AppError::Config(format!(
            "epsilon must be a line count or `none`, got `{text}`"
        ))
    })
}

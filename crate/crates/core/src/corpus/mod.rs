//! Corpus acquisition: repository discovery, manifests, and
//! storage-bounded archive fetching.

mod fetch;
mod manifest;
mod search;

pub use fetch::{dir_size, FetchOutcome, Fetcher};
pub use manifest::{read_manifest, write_manifest};
pub use search::{ApiEndpoint, RetryPolicy, SearchClient, TOKEN_ENV, TOKEN_ENV_FALLBACK};

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collectives::CollectiveSet;

/// Source-language filters accepted by the search API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LanguageFilter {
    C,
    Cpp,
    Fortran,
}

impl LanguageFilter {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "c" => Some(LanguageFilter::C),
            "c++" | "cpp" => Some(LanguageFilter::Cpp),
            "fortran" => Some(LanguageFilter::Fortran),
            _ => None,
        }
    }

    pub fn as_query_value(self) -> &'static str {
        match self {
            LanguageFilter::C => "C",
            LanguageFilter::Cpp => "C++",
            LanguageFilter::Fortran => "Fortran",
        }
    }
}

impl fmt::Display for LanguageFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_query_value())
    }
}

/// Validated description of one discovery run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    keywords: Vec<String>,
    languages: Vec<LanguageFilter>,
    max_results: usize,
    per_page: usize,
}

impl SearchSpec {
    /// Keywords must be collective names from `set`; languages are
    /// deduplicated, keeping their first occurrence. `max_results` caps
    /// how many items one `(keyword, language)` query may return; zero
    /// is allowed and yields an empty manifest without touching the
    /// network.
    pub fn new(
        keywords: Vec<String>,
        languages: Vec<LanguageFilter>,
        max_results: usize,
        per_page: usize,
        set: &CollectiveSet,
    ) -> Result<Self, CorpusError> {
        if keywords.is_empty() {
            return Err(CorpusError::InvalidSpec(
                "at least one search keyword is required".to_string(),
            ));
        }
        let mut canonical = Vec::with_capacity(keywords.len());
        for keyword in &keywords {
            match set.resolve(keyword) {
                Some(name) => canonical.push(name.to_string()),
                None => {
                    return Err(CorpusError::InvalidSpec(format!(
                        "keyword `{keyword}` is not a known collective name"
                    )))
                }
            }
        }
        canonical.dedup();
        if languages.is_empty() {
            return Err(CorpusError::InvalidSpec(
                "at least one language filter is required".to_string(),
            ));
        }
        let mut unique_languages = Vec::new();
        for language in languages {
            if !unique_languages.contains(&language) {
                unique_languages.push(language);
            }
        }
        if per_page == 0 || per_page > 100 {
            return Err(CorpusError::InvalidSpec(format!(
                "per_page must be between 1 and 100, got {per_page}"
            )));
        }
        Ok(SearchSpec {
            keywords: canonical,
            languages: unique_languages,
            max_results,
            per_page,
        })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn languages(&self) -> &[LanguageFilter] {
        &self.languages
    }

    pub fn max_results(&self) -> usize {
        self.max_results
    }

    pub fn per_page(&self) -> usize {
        self.per_page
    }
}

/// One discovered repository, one line of the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub repo_id: String,
    pub owner: String,
    pub name: String,
    pub clone_url: String,
    pub default_revision: String,
    pub matched_keywords: BTreeSet<String>,
    pub retrieval_date: NaiveDate,
}

/// A contiguous slice of manifest entries to fetch under one byte budget.
#[derive(Debug, Clone)]
pub struct Partition {
    pub entries: Vec<ManifestEntry>,
    pub byte_budget: u64,
    pub workdir: PathBuf,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    #[error("no API token: set {TOKEN_ENV} (or {TOKEN_ENV_FALLBACK})")]
    MissingToken,
    #[error("authentication rejected by the search API: {0}")]
    Credential(String),
    #[error("rate limited: gave up after {rejections} rejected requests (retry budget {budget})")]
    RateLimited { rejections: u32, budget: u32 },
    #[error("malformed response for query `{query}` page {page}: {detail}")]
    Protocol {
        query: String,
        page: usize,
        detail: String,
    },
    #[error("request to {url} failed: {detail}")]
    Http { url: String, detail: String },
    #[error("manifest line {line} is invalid: {detail}")]
    InvalidManifest { line: usize, detail: String },
    #[error("byte budget is zero; no repository can be fetched")]
    ZeroBudget,
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to release fetched trees: {0:?}")]
    ReleaseFailed(Vec<PathBuf>),
}

impl CorpusError {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CorpusError::Io {
            context: context.into(),
            source,
        }
    }
}

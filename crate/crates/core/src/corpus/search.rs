//! Code-search API client.
//!
//! One query is issued per `(keyword, language)` combination and paged
//! until the server runs out of items or `max_results` is reached.
//! Results from all queries are merged by `(owner, name)`, recording
//! every keyword that hit, and returned sorted by `(owner, name)`.
//!
//! Rate limiting (HTTP 429, or 403 carrying rate-limit headers) is
//! retried with exponential backoff, honoring a server-provided
//! `Retry-After`. Only when the per-request retry budget is exhausted
//! does the search fail.

use std::collections::BTreeMap;
use std::time::Duration;

use chrono::Utc;
use serde_json::Value;

use super::{CorpusError, ManifestEntry, SearchSpec};

/// Primary environment variable holding the API token.
pub const TOKEN_ENV: &str = "MPIRECON_TOKEN";
/// Fallback environment variable, checked when the primary is unset.
pub const TOKEN_ENV_FALLBACK: &str = "GITHUB_TOKEN";

/// Where and how to talk to the search API.
#[derive(Debug, Clone)]
pub struct ApiEndpoint {
    /// Base URL without a trailing slash, e.g. `https://api.github.com`.
    pub base_url: String,
    pub token: String,
    /// Search expression with `{keyword}` and `{language}` placeholders.
    pub query_template: String,
    pub user_agent: String,
}

impl ApiEndpoint {
    pub fn new(base_url: impl Into<String>, token: impl Into<String>) -> Self {
        ApiEndpoint {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            token: token.into(),
            query_template: "MPI_{keyword} language:{language}".to_string(),
            user_agent: concat!("mpi-recon/", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

/// Backoff parameters for rate-limited requests.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    /// How many rejections of one request to absorb before failing.
    pub max_retries: u32,
    pub base_delay: Duration,
    pub factor: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 5,
            base_delay: Duration::from_secs(1),
            factor: 2,
        }
    }
}

pub struct SearchClient {
    agent: ureq::Agent,
    endpoint: ApiEndpoint,
    retry: RetryPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RawRepo {
    repo_id: String,
    owner: String,
    name: String,
    clone_url: Option<String>,
    default_branch: Option<String>,
}

impl SearchClient {
    pub fn new(endpoint: ApiEndpoint, retry: RetryPolicy) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(60))
            .build();
        SearchClient {
            agent,
            endpoint,
            retry,
        }
    }

    /// Read the API token from `MPIRECON_TOKEN`, falling back to
    /// `GITHUB_TOKEN`.
    pub fn token_from_env() -> Result<String, CorpusError> {
        for var in [TOKEN_ENV, TOKEN_ENV_FALLBACK] {
            if let Ok(token) = std::env::var(var) {
                if !token.trim().is_empty() {
                    return Ok(token);
                }
            }
        }
        Err(CorpusError::MissingToken)
    }

    /// Run every `(keyword, language)` query in `spec` and merge the
    /// results into a deduplicated, `(owner, name)`-sorted entry list.
    pub fn search_repositories(
        &self,
        spec: &SearchSpec,
    ) -> Result<Vec<ManifestEntry>, CorpusError> {
        let mut merged: BTreeMap<(String, String), ManifestEntry> = BTreeMap::new();
        let mut id_owners: BTreeMap<String, (String, String)> = BTreeMap::new();
        if spec.max_results() == 0 {
            return Ok(Vec::new());
        }
        let today = Utc::now().date_naive();

        for keyword in spec.keywords() {
            for language in spec.languages() {
                let query = self
                    .endpoint
                    .query_template
                    .replace("{keyword}", keyword)
                    .replace("{language}", language.as_query_value());
                let mut page = 1usize;
                let mut fetched = 0usize;
                loop {
                    let body = self.get_page(&query, page, spec.per_page())?;
                    let repos = parse_page(&body, &query, page)?;
                    let batch = repos.len();
                    for repo in repos {
                        let key = (repo.owner.clone(), repo.name.clone());
                        if let Some((prev_owner, prev_name)) = id_owners.get(&repo.repo_id) {
                            if (prev_owner, prev_name) != (&key.0, &key.1) {
                                return Err(CorpusError::Protocol {
                                    query: query.clone(),
                                    page,
                                    detail: format!(
                                        "repository id {} reported for both {}/{} and {}/{}",
                                        repo.repo_id, prev_owner, prev_name, key.0, key.1
                                    ),
                                });
                            }
                        } else {
                            id_owners.insert(repo.repo_id.clone(), key.clone());
                        }
                        merged
                            .entry(key)
                            .and_modify(|entry| {
                                entry.matched_keywords.insert(keyword.clone());
                            })
                            .or_insert_with(|| ManifestEntry {
                                repo_id: repo.repo_id.clone(),
                                owner: repo.owner.clone(),
                                name: repo.name.clone(),
                                clone_url: repo.clone_url.clone().unwrap_or_else(|| {
                                    format!(
                                        "https://github.com/{}/{}.git",
                                        repo.owner, repo.name
                                    )
                                }),
                                default_revision: repo
                                    .default_branch
                                    .clone()
                                    .unwrap_or_else(|| "HEAD".to_string()),
                                matched_keywords: [keyword.clone()].into(),
                                retrieval_date: today,
                            });
                    }
                    fetched += batch;
                    if batch < spec.per_page() || fetched >= spec.max_results() {
                        break;
                    }
                    page += 1;
                }
            }
        }

        Ok(merged.into_values().collect())
    }

    /// One page request, retrying through rate-limit rejections.
    fn get_page(&self, query: &str, page: usize, per_page: usize) -> Result<Value, CorpusError> {
        let url = format!("{}/search/code", self.endpoint.base_url);
        let mut rejections = 0u32;
        let mut delay = self.retry.base_delay;
        loop {
            let response = self
                .agent
                .get(&url)
                .query("q", query)
                .query("per_page", &per_page.to_string())
                .query("page", &page.to_string())
                .set("Authorization", &format!("Bearer {}", self.endpoint.token))
                .set("User-Agent", &self.endpoint.user_agent)
                .set("Accept", "application/vnd.github+json")
                .call();

            match response {
                Ok(resp) => {
                    return resp.into_json::<Value>().map_err(|e| CorpusError::Protocol {
                        query: query.to_string(),
                        page,
                        detail: format!("response body is not JSON: {e}"),
                    });
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let retry_after = resp
                        .header("retry-after")
                        .and_then(|v| v.trim().parse::<u64>().ok());
                    let remaining_zero = resp
                        .header("x-ratelimit-remaining")
                        .map(|v| v.trim() == "0")
                        .unwrap_or(false);
                    let rate_limited = status == 429
                        || (status == 403 && (retry_after.is_some() || remaining_zero));
                    if rate_limited {
                        rejections += 1;
                        if rejections > self.retry.max_retries {
                            return Err(CorpusError::RateLimited {
                                rejections,
                                budget: self.retry.max_retries,
                            });
                        }
                        let wait = match retry_after {
                            Some(seconds) => Duration::from_secs(seconds),
                            None => delay,
                        };
                        std::thread::sleep(wait);
                        delay = delay.saturating_mul(self.retry.factor);
                        continue;
                    }
                    if status == 401 || status == 403 {
                        return Err(CorpusError::Credential(format!(
                            "status {status} from {url}"
                        )));
                    }
                    return Err(CorpusError::Http {
                        url,
                        detail: format!("status {status}"),
                    });
                }
                Err(ureq::Error::Transport(t)) => {
                    return Err(CorpusError::Http {
                        url,
                        detail: t.to_string(),
                    });
                }
            }
        }
    }
}

/// Pull the repository list out of one search-response page.
///
/// Accepts both shapes the API family uses: items that *are* repository
/// objects, and code-match items carrying a `repository` object.
fn parse_page(body: &Value, query: &str, page: usize) -> Result<Vec<RawRepo>, CorpusError> {
    let protocol = |detail: String| CorpusError::Protocol {
        query: query.to_string(),
        page,
        detail,
    };
    let items = body
        .get("items")
        .and_then(Value::as_array)
        .ok_or_else(|| protocol("missing `items` array".to_string()))?;

    let mut repos = Vec::with_capacity(items.len());
    for (idx, item) in items.iter().enumerate() {
        let repo = item.get("repository").unwrap_or(item);
        let repo_id = match repo.get("id") {
            Some(Value::Number(n)) => n.to_string(),
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            _ => return Err(protocol(format!("item {idx} has no usable `id`"))),
        };
        let name = repo
            .get("name")
            .and_then(Value::as_str)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| protocol(format!("item {idx} has no `name`")))?
            .to_string();
        let owner = repo
            .get("owner")
            .and_then(|o| o.get("login"))
            .and_then(Value::as_str)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| protocol(format!("item {idx} has no `owner.login`")))?
            .to_string();
        let clone_url = repo
            .get("clone_url")
            .and_then(Value::as_str)
            .map(str::to_string);
        let default_branch = repo
            .get("default_branch")
            .and_then(Value::as_str)
            .map(str::to_string);
        repos.push(RawRepo {
            repo_id,
            owner,
            name,
            clone_url,
            default_branch,
        });
    }
    Ok(repos)
}

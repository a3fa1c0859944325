//! Storage-bounded archive fetching.
//!
//! Archives are streamed: the HTTP (or local file) byte stream feeds the
//! gzip decoder feeds the tar reader, and only extracted files ever touch
//! disk. A partition stops fetching once the extracted bytes reach its
//! budget, so disk use never exceeds the budget by more than the last
//! repository. After ingest, [`Fetcher::release_partition`] deletes the
//! trees again.

use std::fs;
use std::io::Read;
use std::path::{Component, Path, PathBuf};

use flate2::read::GzDecoder;
use url::Url;

use super::{CorpusError, ManifestEntry, Partition};

/// Archive URL template used when an entry's clone URL is not itself an
/// archive: `{owner}`, `{name}`, and `{rev}` are substituted.
pub const DEFAULT_ARCHIVE_TEMPLATE: &str =
    "https://codeload.github.com/{owner}/{name}/tar.gz/{rev}";

/// What one partition fetch did.
#[derive(Debug)]
pub struct FetchOutcome {
    /// Entries whose trees are now on disk, with their extraction roots.
    pub fetched: Vec<(ManifestEntry, PathBuf)>,
    /// Entries that failed to download or extract, with the reason.
    pub failed: Vec<(ManifestEntry, String)>,
    /// Entries skipped because the byte budget was already spent.
    pub deferred: Vec<ManifestEntry>,
    /// Extracted bytes on disk when the partition was at its fullest.
    pub peak_disk_bytes: u64,
}

pub struct Fetcher {
    agent: ureq::Agent,
    archive_template: String,
}

impl Fetcher {
    /// `archive_template` of `None` uses [`DEFAULT_ARCHIVE_TEMPLATE`].
    pub fn new(archive_template: Option<String>) -> Self {
        Fetcher {
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(600))
                .build(),
            archive_template: archive_template
                .unwrap_or_else(|| DEFAULT_ARCHIVE_TEMPLATE.to_string()),
        }
    }

    /// Download and extract entries in order until the budget is spent.
    ///
    /// Individual failures (bad URL, missing archive, corrupt stream)
    /// are reported per entry and do not abort the partition. A zero
    /// byte budget is an error before anything touches the network.
    pub fn fetch_partition(&self, partition: &Partition) -> Result<FetchOutcome, CorpusError> {
        if partition.byte_budget == 0 {
            return Err(CorpusError::ZeroBudget);
        }
        if !partition.workdir.is_dir() {
            return Err(CorpusError::io(
                format!("workdir {}", partition.workdir.display()),
                std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            ));
        }

        let mut outcome = FetchOutcome {
            fetched: Vec::new(),
            failed: Vec::new(),
            deferred: Vec::new(),
            peak_disk_bytes: 0,
        };
        let mut used: u64 = 0;

        for (idx, entry) in partition.entries.iter().enumerate() {
            if used >= partition.byte_budget {
                outcome.deferred = partition.entries[idx..].to_vec();
                break;
            }
            let dest = partition.workdir.join(tree_dir_name(entry));
            match self.fetch_one(entry, &dest) {
                Ok(()) => {
                    used += dir_size(&dest);
                    outcome.peak_disk_bytes = outcome.peak_disk_bytes.max(used);
                    outcome.fetched.push((entry.clone(), dest));
                }
                Err(err) => {
                    let _ = fs::remove_dir_all(&dest);
                    outcome.failed.push((entry.clone(), err.to_string()));
                }
            }
        }
        Ok(outcome)
    }

    /// Delete every tree this partition may have extracted. Entries that
    /// never made it to disk are fine; failures to remove existing trees
    /// are collected into one error.
    pub fn release_partition(partition: &Partition) -> Result<(), CorpusError> {
        let mut stuck = Vec::new();
        for entry in &partition.entries {
            let dest = partition.workdir.join(tree_dir_name(entry));
            if dest.exists() && fs::remove_dir_all(&dest).is_err() && dest.exists() {
                stuck.push(dest);
            }
        }
        if stuck.is_empty() {
            Ok(())
        } else {
            Err(CorpusError::ReleaseFailed(stuck))
        }
    }

    fn fetch_one(&self, entry: &ManifestEntry, dest: &Path) -> Result<(), CorpusError> {
        let url = self.archive_url(entry)?;
        if dest.exists() {
            fs::remove_dir_all(dest)
                .map_err(|e| CorpusError::io(format!("clearing {}", dest.display()), e))?;
        }
        fs::create_dir_all(dest)
            .map_err(|e| CorpusError::io(format!("creating {}", dest.display()), e))?;

        if url.scheme() == "file" {
            let path = url
                .to_file_path()
                .map_err(|_| CorpusError::Http {
                    url: url.to_string(),
                    detail: "file URL has no usable path".to_string(),
                })?;
            let file = fs::File::open(&path)
                .map_err(|e| CorpusError::io(format!("opening {}", path.display()), e))?;
            extract_tar_gz(file, dest)
        } else {
            let response = self
                .agent
                .get(url.as_str())
                .call()
                .map_err(|e| CorpusError::Http {
                    url: url.to_string(),
                    detail: e.to_string(),
                })?;
            extract_tar_gz(response.into_reader(), dest)
        }
    }

    /// Entries whose clone URL already points at a tarball (or any
    /// `file://` URL) are fetched directly; anything else goes through
    /// the archive template.
    fn archive_url(&self, entry: &ManifestEntry) -> Result<Url, CorpusError> {
        let parsed = Url::parse(&entry.clone_url).map_err(|e| CorpusError::Http {
            url: entry.clone_url.clone(),
            detail: format!("invalid clone URL: {e}"),
        })?;
        let is_archive = parsed.path().ends_with(".tar.gz") || parsed.path().ends_with(".tgz");
        if parsed.scheme() == "file" || is_archive {
            return Ok(parsed);
        }
        let rendered = self
            .archive_template
            .replace("{owner}", &entry.owner)
            .replace("{name}", &entry.name)
            .replace("{rev}", &entry.default_revision);
        Url::parse(&rendered).map_err(|e| CorpusError::Http {
            url: rendered,
            detail: format!("invalid archive URL template result: {e}"),
        })
    }
}

/// Directory name for an entry's extracted tree: the repo id, made safe
/// for the filesystem.
fn tree_dir_name(entry: &ManifestEntry) -> String {
    entry
        .repo_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Stream-extract a gzipped tar into `dest`, dropping the archive's
/// single top-level directory the way code-host tarballs have one.
///
/// Only regular files and directories are materialized; links and
/// specials are skipped. Entries that would escape `dest` are rejected.
fn extract_tar_gz(reader: impl Read, dest: &Path) -> Result<(), CorpusError> {
    let gz = GzDecoder::new(reader);
    let mut archive = tar::Archive::new(gz);
    let entries = archive
        .entries()
        .map_err(|e| CorpusError::io("reading archive", e))?;
    for entry in entries {
        let mut entry = entry.map_err(|e| CorpusError::io("reading archive entry", e))?;
        let path = entry
            .path()
            .map_err(|e| CorpusError::io("reading archive entry path", e))?
            .into_owned();
        let kind = entry.header().entry_type();
        let Some(stripped) = strip_root_component(&path, kind.is_dir())? else {
            continue;
        };
        let target = dest.join(&stripped);

        if kind.is_dir() {
            fs::create_dir_all(&target)
                .map_err(|e| CorpusError::io(format!("creating {}", target.display()), e))?;
        } else if kind.is_file() {
            if let Some(parent) = target.parent() {
                fs::create_dir_all(parent)
                    .map_err(|e| CorpusError::io(format!("creating {}", parent.display()), e))?;
            }
            let mut file = fs::File::create(&target)
                .map_err(|e| CorpusError::io(format!("creating {}", target.display()), e))?;
            std::io::copy(&mut entry, &mut file)
                .map_err(|e| CorpusError::io(format!("extracting {}", target.display()), e))?;
        }
        // Symlinks, hardlinks, and device nodes are not extracted: the
        // scanner would not follow them anyway and links could point
        // outside the tree.
    }
    Ok(())
}

/// Remove the archive's root directory from an entry path. `Path` drops
/// trailing slashes, so the entry type has to disambiguate a top-level
/// name: a single-component directory is the archive root itself and
/// yields `None`, while a single-component file is kept as-is so flat
/// archives still extract.
fn strip_root_component(path: &Path, is_dir: bool) -> Result<Option<PathBuf>, CorpusError> {
    let mut components = Vec::new();
    for component in path.components() {
        match component {
            Component::Normal(part) => components.push(part),
            Component::CurDir => {}
            _ => {
                return Err(CorpusError::io(
                    format!("archive entry {}", path.display()),
                    std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        "path escapes the extraction root",
                    ),
                ))
            }
        }
    }
    match components.len() {
        0 => Ok(None),
        1 if is_dir => Ok(None),
        1 => Ok(Some(PathBuf::from(components[0]))),
        _ => Ok(Some(components[1..].iter().collect())),
    }
}

/// Total size in bytes of the regular files under `dir`.
pub fn dir_size(dir: &Path) -> u64 {
    let mut total = 0u64;
    for entry in walkdir::WalkDir::new(dir).follow_links(false) {
        if let Ok(entry) = entry {
            if entry.file_type().is_file() {
                if let Ok(meta) = entry.metadata() {
                    total += meta.len();
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_component_stripping() {
        let strip_dir = |s: &str| strip_root_component(Path::new(s), true).unwrap();
        let strip_file = |s: &str| strip_root_component(Path::new(s), false).unwrap();
        assert_eq!(strip_dir("repo-1.0/"), None);
        assert_eq!(strip_file("repo-1.0/src/main.c"), Some(PathBuf::from("src/main.c")));
        assert_eq!(strip_dir("repo-1.0/src/"), Some(PathBuf::from("src")));
        assert_eq!(strip_file("repo-1.0/README"), Some(PathBuf::from("README")));
        assert_eq!(strip_file("flat.c"), Some(PathBuf::from("flat.c")));
        assert!(strip_root_component(Path::new("../escape.c"), false).is_err());
        assert!(strip_root_component(Path::new("/abs.c"), false).is_err());
    }

    #[test]
    fn tree_dir_names_are_fs_safe() {
        let mut entry = ManifestEntry {
            repo_id: "42".to_string(),
            owner: "a".to_string(),
            name: "b".to_string(),
            clone_url: "https://example.invalid/a/b.git".to_string(),
            default_revision: "main".to_string(),
            matched_keywords: Default::default(),
            retrieval_date: chrono::NaiveDate::from_ymd_opt(2026, 1, 1).unwrap(),
        };
        assert_eq!(tree_dir_name(&entry), "42");
        entry.repo_id = "weird/..id".to_string();
        assert_eq!(tree_dir_name(&entry), "weird_..id");
    }

    #[test]
    fn archive_url_selection() {
        let fetcher = Fetcher::new(Some(
            "https://archives.invalid/{owner}/{name}/{rev}.tar.gz".to_string(),
        ));
        let mut entry = ManifestEntry {
            repo_id: "1".to_string(),
            owner: "alice".to_string(),
            name: "heat".to_string(),
            clone_url: "https://example.invalid/alice/heat.git".to_string(),
            default_revision: "v2".to_string(),
            matched_keywords: Default::default(),
            retrieval_date: chrono::NaiveDate::from_ymd_opt(2026, 1, 1).unwrap(),
        };
        assert_eq!(
            fetcher.archive_url(&entry).unwrap().as_str(),
            "https://archives.invalid/alice/heat/v2.tar.gz"
        );

        entry.clone_url = "file:///tmp/heat.tar.gz".to_string();
        assert_eq!(
            fetcher.archive_url(&entry).unwrap().as_str(),
            "file:///tmp/heat.tar.gz"
        );

        entry.clone_url = "https://mirror.invalid/snapshots/heat.tgz".to_string();
        assert_eq!(
            fetcher.archive_url(&entry).unwrap().as_str(),
            "https://mirror.invalid/snapshots/heat.tgz"
        );
    }

    #[test]
    fn zero_budget_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let fetcher = Fetcher::new(None);
        let partition = Partition {
            entries: Vec::new(),
            byte_budget: 0,
            workdir: dir.path().to_path_buf(),
        };
        assert!(matches!(
            fetcher.fetch_partition(&partition),
            Err(CorpusError::ZeroBudget)
        ));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn missing_workdir_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let fetcher = Fetcher::new(None);
        let partition = Partition {
            entries: Vec::new(),
            byte_budget: 1024,
            workdir: dir.path().join("missing"),
        };
        assert!(matches!(
            fetcher.fetch_partition(&partition),
            Err(CorpusError::Io { .. })
        ));
    }
}

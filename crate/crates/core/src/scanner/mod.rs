//! Source-tree scanning.
//!
//! [`scan_tree`] walks a directory, classifies files by extension, counts
//! lines, strips comments and literals, and extracts collective call
//! sites. Files are processed in parallel; the result is sorted and
//! deduplicated afterwards, so output never depends on walk or thread
//! order.

mod counts;
mod extract;
mod language;
mod strip;

pub use counts::{count_lines, LineCounts};
pub use extract::extract_call_sites;
pub use language::{classify_file, Language};
pub use strip::{strip_non_code, Stripped};

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::collectives::CollectiveSet;
use crate::store::RepoRecord;

/// Fraction of replacement characters above which a file is treated as
/// binary: more than one in ten decoded characters.
const BINARY_REPLACEMENT_RATIO: (usize, usize) = (1, 10);

/// Line-count metadata for one scanned file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub repo_id: String,
    /// Path relative to the scan root, `/`-separated.
    pub filename: String,
    pub counts: LineCounts,
}

/// One collective call site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub repo_id: String,
    pub filename: String,
    pub collective: String,
    pub line_number: u32,
}

/// A file the scanner skipped or flagged, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanLogEntry {
    pub filename: String,
    pub reason: String,
}

/// Everything one tree scan produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub repo: RepoRecord,
    pub files: Vec<FileRecord>,
    pub call_sites: Vec<CallSite>,
    pub log: Vec<ScanLogEntry>,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan root `{0}` is not a directory")]
    NotADirectory(PathBuf),
}

/// Scan every recognized source file under `root`.
///
/// Files with extensions outside the language table produce no records.
/// Unreadable files and walk errors are logged and skipped. Files whose
/// content is not text (more than 10% replacement characters after lossy
/// UTF-8 decoding) keep their total line count but get no language
/// attribution and no call sites. Symbolic links are never followed;
/// one with a source extension is noted in the scan log.
///
/// Call sites are deduplicated on (filename, line, collective): a line
/// that repeats the same collective is recorded once. Results are sorted
/// by filename, then line number, then collective name.
pub fn scan_tree(
    root: &Path,
    repo: RepoRecord,
    set: &CollectiveSet,
) -> Result<ScanResult, ScanError> {
    if !root.is_dir() {
        return Err(ScanError::NotADirectory(root.to_path_buf()));
    }

    let mut paths = Vec::new();
    let mut log = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        match entry {
            Ok(e) if e.file_type().is_file() => paths.push(e.into_path()),
            Ok(e) if e.path_is_symlink() && language::classify_file(e.path()).is_some() => {
                // A source-looking symlink is skipped, but silently losing
                // it would be surprising, so leave a trace. The target, if
                // it exists inside the tree, is scanned on its own.
                log.push(ScanLogEntry {
                    filename: relative_name(root, e.path()),
                    reason: "symbolic link; not followed".to_string(),
                });
            }
            Ok(_) => {}
            Err(err) => {
                let filename = err
                    .path()
                    .map(|p| relative_name(root, p))
                    .unwrap_or_else(|| "<unknown>".to_string());
                log.push(ScanLogEntry {
                    filename,
                    reason: format!("walk error: {err}"),
                });
            }
        }
    }

    let outcomes: Vec<FileOutcome> = paths
        .par_iter()
        .map(|path| scan_file(root, path, &repo.repo_id, set))
        .collect();

    let mut files = Vec::new();
    let mut call_sites = Vec::new();
    for outcome in outcomes {
        files.extend(outcome.record);
        call_sites.extend(outcome.sites);
        log.extend(outcome.log);
    }

    files.sort_by(|a, b| a.filename.cmp(&b.filename));
    call_sites.sort_by(|a, b| {
        a.filename
            .cmp(&b.filename)
            .then_with(|| a.line_number.cmp(&b.line_number))
            .then_with(|| a.collective.cmp(&b.collective))
    });
    call_sites.dedup();
    log.sort_by(|a, b| a.filename.cmp(&b.filename).then_with(|| a.reason.cmp(&b.reason)));

    debug_assert!(internally_consistent(&files, &call_sites));

    Ok(ScanResult {
        repo,
        files,
        call_sites,
        log,
    })
}

struct FileOutcome {
    record: Option<FileRecord>,
    sites: Vec<CallSite>,
    log: Vec<ScanLogEntry>,
}

impl FileOutcome {
    fn empty() -> Self {
        FileOutcome {
            record: None,
            sites: Vec::new(),
            log: Vec::new(),
        }
    }
}

fn scan_file(root: &Path, path: &Path, repo_id: &str, set: &CollectiveSet) -> FileOutcome {
    let filename = relative_name(root, path);
    let Some(language) = classify_file(path) else {
        return FileOutcome::empty();
    };

    let bytes = match fs::read(path) {
        Ok(bytes) => bytes,
        Err(err) => {
            return FileOutcome {
                record: None,
                sites: Vec::new(),
                log: vec![ScanLogEntry {
                    filename,
                    reason: format!("unreadable: {err}"),
                }],
            }
        }
    };

    let text = String::from_utf8_lossy(&bytes);
    let replaced = text.chars().filter(|c| *c == '\u{FFFD}').count();
    let total_chars = text.chars().count();
    let (num, den) = BINARY_REPLACEMENT_RATIO;
    if total_chars > 0 && replaced * den > total_chars * num {
        let counts = LineCounts {
            total: text.lines().count() as u64,
            ..LineCounts::default()
        };
        return FileOutcome {
            record: Some(FileRecord {
                repo_id: repo_id.to_string(),
                filename: filename.clone(),
                counts,
            }),
            sites: Vec::new(),
            log: vec![ScanLogEntry {
                filename,
                reason: format!(
                    "not text ({replaced} of {total_chars} characters undecodable); lines counted, no extraction"
                ),
            }],
        };
    }

    let counts = count_lines(&text, language);
    let stripped = strip_non_code(&text, language);
    let log = stripped
        .warnings
        .iter()
        .map(|w| ScanLogEntry {
            filename: filename.clone(),
            reason: w.clone(),
        })
        .collect();
    let sites = extract_call_sites(&stripped.text, language, set)
        .into_iter()
        .map(|(collective, line_number)| CallSite {
            repo_id: repo_id.to_string(),
            filename: filename.clone(),
            collective,
            line_number,
        })
        .collect();

    FileOutcome {
        record: Some(FileRecord {
            repo_id: repo_id.to_string(),
            filename,
            counts,
        }),
        sites,
        log,
    }
}

fn relative_name(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let mut parts = Vec::new();
    for component in rel.components() {
        parts.push(component.as_os_str().to_string_lossy().into_owned());
    }
    parts.join("/")
}

fn internally_consistent(files: &[FileRecord], sites: &[CallSite]) -> bool {
    let names: HashSet<&str> = files.iter().map(|f| f.filename.as_str()).collect();
    sites
        .iter()
        .all(|s| names.contains(s.filename.as_str()) && s.line_number >= 1)
}

/// One line of the `--emit-scan` serialization: a tagged JSON object per
/// file record and per call site, in result order.
#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum EmitRecord<'a> {
    File(&'a FileRecord),
    CallSite(&'a CallSite),
}

/// Write `scan` as JSON Lines: all file records, then all call sites.
pub fn write_scan_records(scan: &ScanResult, mut out: impl Write) -> std::io::Result<()> {
    for file in &scan.files {
        serde_json::to_writer(&mut out, &EmitRecord::File(file))?;
        out.write_all(b"\n")?;
    }
    for site in &scan.call_sites {
        serde_json::to_writer(&mut out, &EmitRecord::CallSite(site))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

//! The fetch/scan/ingest loop behind the `run` subcommand.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mpi_recon_core::corpus::{read_manifest, Fetcher, ManifestEntry, Partition};
use mpi_recon_core::scanner::{scan_tree, write_scan_records};
use mpi_recon_core::store::{RepoRecord, Store};
use mpi_recon_core::CollectiveSet;

use crate::lock::DbLock;
use crate::AppError;

/// Effective settings for one pipeline run, after flag/config/default
/// resolution.
pub struct RunSettings {
    pub db: PathBuf,
    pub manifest: PathBuf,
    pub workdir: PathBuf,
    pub byte_budget: u64,
    pub archive_template: Option<String>,
    pub emit_scan: Option<PathBuf>,
    pub scan_log: PathBuf,
    pub set: CollectiveSet,
}

pub struct RunReport {
    pub manifest_entries: usize,
    /// Entries whose revision was already in the store (or repeated in
    /// the manifest).
    pub skipped: usize,
    pub scanned: usize,
    pub failed: Vec<(String, String)>,
    pub files: u64,
    pub call_sites: u64,
    pub peak_disk_bytes: u64,
    pub digest: String,
}

fn slug(entry: &ManifestEntry) -> String {
    format!("{}/{} ({})", entry.owner, entry.name, entry.repo_id)
}

fn create_parent(path: &Path) -> Result<(), AppError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| AppError::io(format!("creating {}", parent.display()), e))?;
        }
    }
    Ok(())
}

/// Fetch every manifest entry not yet ingested, scan it, ingest it, and
/// release the tree. Fetching happens in waves sized by the byte
/// budget: entries deferred by one wave are picked up by the next once
/// the previous trees have been deleted, so disk usage stays bounded by
/// roughly one budget's worth of extracted source.
pub fn run_pipeline(settings: &RunSettings) -> Result<RunReport, AppError> {
    let entries = read_manifest(&settings.manifest)?;
    let manifest_entries = entries.len();

    create_parent(&settings.db)?;
    create_parent(&settings.scan_log)?;
    std::fs::create_dir_all(&settings.workdir)
        .map_err(|e| AppError::io(format!("creating {}", settings.workdir.display()), e))?;

    let _lock = DbLock::acquire(&settings.db)?;
    let mut store = Store::open(&settings.db)?;

    let mut seen = BTreeSet::new();
    let mut pending = Vec::new();
    let mut skipped = 0usize;
    for entry in entries {
        let key = (entry.repo_id.clone(), entry.default_revision.clone());
        if !seen.insert(key) || store.has_revision(&entry.repo_id, &entry.default_revision)? {
            skipped += 1;
            continue;
        }
        pending.push(entry);
    }

    let mut emit = match &settings.emit_scan {
        Some(path) => {
            create_parent(path)?;
            let file = File::create(path)
                .map_err(|e| AppError::io(format!("creating {}", path.display()), e))?;
            Some(BufWriter::new(file))
        }
        None => None,
    };

    let fetcher = Fetcher::new(settings.archive_template.clone());
    let mut log_lines: Vec<String> = Vec::new();
    let mut report = RunReport {
        manifest_entries,
        skipped,
        scanned: 0,
        failed: Vec::new(),
        files: 0,
        call_sites: 0,
        peak_disk_bytes: 0,
        digest: String::new(),
    };

    while !pending.is_empty() {
        let partition = Partition {
            entries: std::mem::take(&mut pending),
            byte_budget: settings.byte_budget,
            workdir: settings.workdir.clone(),
        };
        let outcome = fetcher.fetch_partition(&partition)?;
        report.peak_disk_bytes = report.peak_disk_bytes.max(outcome.peak_disk_bytes);

        for (entry, reason) in &outcome.failed {
            log_lines.push(format!("{}: fetch failed: {reason}", slug(entry)));
            report.failed.push((slug(entry), reason.clone()));
        }

        let mut fetched_entries = Vec::with_capacity(outcome.fetched.len());
        for (entry, dir) in &outcome.fetched {
            fetched_entries.push(entry.clone());
            let repo = RepoRecord {
                repo_id: entry.repo_id.clone(),
                owner: entry.owner.clone(),
                revision_id: entry.default_revision.clone(),
                clone_url: entry.clone_url.clone(),
                retrieval_date: entry.retrieval_date,
            };
            match scan_tree(dir, repo, &settings.set) {
                Ok(scan) => {
                    for item in &scan.log {
                        log_lines.push(format!(
                            "{}: {}: {}",
                            slug(entry),
                            item.filename,
                            item.reason
                        ));
                    }
                    if let Some(writer) = emit.as_mut() {
                        write_scan_records(&scan, &mut *writer).map_err(|e| {
                            AppError::io("writing scan records".to_string(), e)
                        })?;
                    }
                    let summary = store.ingest(&scan)?;
                    log::info!(
                        "ingested {} ({} files, {} call sites)",
                        slug(entry),
                        summary.files,
                        summary.call_sites
                    );
                    report.files += summary.files;
                    report.call_sites += summary.call_sites;
                    report.scanned += 1;
                }
                Err(e) => {
                    log_lines.push(format!("{}: scan failed: {e}", slug(entry)));
                    report.failed.push((slug(entry), e.to_string()));
                }
            }
        }

        Fetcher::release_partition(&Partition {
            entries: fetched_entries,
            byte_budget: settings.byte_budget,
            workdir: settings.workdir.clone(),
        })?;
        pending = outcome.deferred;
    }

    if let Some(mut writer) = emit {
        writer
            .flush()
            .map_err(|e| AppError::io("writing scan records".to_string(), e))?;
    }

    let mut log_file = File::create(&settings.scan_log)
        .map_err(|e| AppError::io(format!("creating {}", settings.scan_log.display()), e))?;
    for line in &log_lines {
        writeln!(log_file, "{line}")
            .map_err(|e| AppError::io(format!("writing {}", settings.scan_log.display()), e))?;
    }

    report.digest = store.content_digest()?;
    Ok(report)
}

//! Synthetic call-site corpora for randomized testing.

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::Rng;

use mpi_recon_core::scanner::{CallSite, FileRecord, LineCounts, ScanResult};
use mpi_recon_core::store::{RepoRecord, Store};

/// One synthetic file: (line, collective) sites, sorted and unique per
/// (line, collective) like real scanner output.
#[derive(Debug, Clone)]
pub struct SyntheticFile {
    pub filename: String,
    pub sites: Vec<(String, u32)>,
}

/// Generate up to `max_files` files with up to `max_sites` sites each,
/// drawing names from `names` and lines from 1..=600 so co-occurrence
/// distances get exercised around typical epsilon values.
pub fn random_corpus(
    rng: &mut impl Rng,
    max_files: usize,
    max_sites: usize,
    names: &[&str],
) -> Vec<SyntheticFile> {
    let file_count = rng.gen_range(1..=max_files.max(1));
    (0..file_count)
        .map(|idx| {
            let site_count = rng.gen_range(0..=max_sites);
            let mut sites: Vec<(String, u32)> = (0..site_count)
                .map(|_| {
                    let name = names.choose(rng).expect("names not empty").to_string();
                    let line = rng.gen_range(1..=600u32);
                    (name, line)
                })
                .collect();
            sites.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            sites.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
            SyntheticFile {
                filename: format!("src/file_{idx}.c"),
                sites,
            }
        })
        .collect()
}

/// Wrap synthetic files in a scan result for `repo_id` at revision `r1`.
pub fn as_scan_result(repo_id: &str, files: &[SyntheticFile]) -> ScanResult {
    let repo = RepoRecord {
        repo_id: repo_id.to_string(),
        owner: "fixture".to_string(),
        revision_id: "r1".to_string(),
        clone_url: format!("https://example.invalid/fixture/{repo_id}.git"),
        retrieval_date: NaiveDate::from_ymd_opt(2026, 1, 1).expect("valid date"),
    };
    let file_records = files
        .iter()
        .map(|f| FileRecord {
            repo_id: repo_id.to_string(),
            filename: f.filename.clone(),
            counts: LineCounts {
                c: 600,
                total: 600,
                ..LineCounts::default()
            },
        })
        .collect();
    let mut call_sites: Vec<CallSite> = files
        .iter()
        .flat_map(|f| {
            f.sites.iter().map(|(name, line)| CallSite {
                repo_id: repo_id.to_string(),
                filename: f.filename.clone(),
                collective: name.clone(),
                line_number: *line,
            })
        })
        .collect();
    call_sites.sort_by(|a, b| {
        a.filename
            .cmp(&b.filename)
            .then_with(|| a.line_number.cmp(&b.line_number))
            .then_with(|| a.collective.cmp(&b.collective))
    });
    ScanResult {
        repo,
        files: file_records,
        call_sites,
        log: Vec::new(),
    }
}

/// Ingest synthetic files into `store` under `repo_id`.
pub fn seed_store(store: &mut Store, repo_id: &str, files: &[SyntheticFile]) {
    store
        .ingest(&as_scan_result(repo_id, files))
        .expect("synthetic scan ingests cleanly");
}

//! Relational storage for scan results.
//!
//! Three tables keyed by `(repo_id, revision_id)`: `repos`, `files`, and
//! `call_sites`. Ingesting the same repository revision again replaces
//! its rows atomically, so re-running a pipeline never duplicates data.
//! Two revisions of one repository coexist as separate rows.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rusqlite::{params, Connection, OptionalExtension};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::collectives::CollectiveSet;
use crate::scanner::ScanResult;

/// One repository at one revision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoRecord {
    pub repo_id: String,
    pub owner: String,
    pub revision_id: String,
    pub clone_url: String,
    pub retrieval_date: NaiveDate,
}

/// A call site as read back from the store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub collective: String,
    pub line_number: u32,
}

/// All call sites of one file, sorted by line number then collective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSites {
    pub repo_id: String,
    pub revision_id: String,
    pub filename: String,
    pub sites: Vec<Site>,
}

/// Row filter for [`Store::call_sites_by_file`].
#[derive(Debug, Clone, Default)]
pub struct SiteFilter {
    pub repo_id: Option<String>,
    /// Restrict to these collective names; `None` means all.
    pub collectives: Option<Vec<String>>,
}

impl SiteFilter {
    pub fn collectives<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        SiteFilter {
            repo_id: None,
            collectives: Some(names.into_iter().map(Into::into).collect()),
        }
    }
}

/// What one ingest did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestSummary {
    pub files: u64,
    pub call_sites: u64,
    /// True when rows for this `(repo_id, revision_id)` already existed
    /// and were replaced.
    pub replaced: bool,
}

/// Which table [`Store::export_csv`] writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportTable {
    Metadata,
    Collectives,
}

impl ExportTable {
    pub fn name(self) -> &'static str {
        match self {
            ExportTable::Metadata => "metadata",
            ExportTable::Collectives => "collectives",
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("database error: {0}")]
    Db(#[from] rusqlite::Error),
    #[error("unknown collective `{0}`")]
    UnknownCollective(String),
    #[error("scan result is inconsistent: {0}")]
    InconsistentScan(String),
    #[error("failed to write export to {path}: {source}")]
    Export {
        path: PathBuf,
        source: csv::Error,
    },
}

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS repos (
    repo_id        TEXT NOT NULL,
    revision_id    TEXT NOT NULL,
    owner          TEXT NOT NULL,
    clone_url      TEXT NOT NULL,
    retrieval_date TEXT NOT NULL,
    PRIMARY KEY (repo_id, revision_id)
);

CREATE TABLE IF NOT EXISTS files (
    repo_id       TEXT NOT NULL,
    revision_id   TEXT NOT NULL,
    filename      TEXT NOT NULL,
    openmp_lines  INTEGER NOT NULL,
    openacc_lines INTEGER NOT NULL,
    cuda_lines    INTEGER NOT NULL,
    opencl_lines  INTEGER NOT NULL,
    c_lines       INTEGER NOT NULL,
    cpp_lines     INTEGER NOT NULL,
    fortran_lines INTEGER NOT NULL,
    total_lines   INTEGER NOT NULL,
    PRIMARY KEY (repo_id, revision_id, filename),
    FOREIGN KEY (repo_id, revision_id)
        REFERENCES repos (repo_id, revision_id) ON DELETE CASCADE
);

CREATE TABLE IF NOT EXISTS call_sites (
    repo_id     TEXT NOT NULL,
    revision_id TEXT NOT NULL,
    filename    TEXT NOT NULL,
    collective  TEXT NOT NULL,
    line_number INTEGER NOT NULL,
    PRIMARY KEY (repo_id, revision_id, filename, line_number, collective),
    FOREIGN KEY (repo_id, revision_id, filename)
        REFERENCES files (repo_id, revision_id, filename) ON DELETE CASCADE
);

CREATE INDEX IF NOT EXISTS idx_call_sites_collective ON call_sites (collective);
";

/// SQLite-backed store. One connection, foreign keys enforced.
pub struct Store {
    conn: Connection,
}

impl Store {
    /// Open (creating if absent) a store at `path`.
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        Self::from_connection(Connection::open(path)?)
    }

    /// A store that lives only in memory; used by analyses and tests.
    pub fn open_in_memory() -> Result<Self, StoreError> {
        Self::from_connection(Connection::open_in_memory()?)
    }

    fn from_connection(conn: Connection) -> Result<Self, StoreError> {
        conn.pragma_update(None, "foreign_keys", true)?;
        conn.execute_batch(SCHEMA)?;
        Ok(Store { conn })
    }

    /// Insert everything a scan produced, replacing any previous rows for
    /// the same `(repo_id, revision_id)` in one transaction.
    pub fn ingest(&mut self, scan: &ScanResult) -> Result<IngestSummary, StoreError> {
        let filenames: HashSet<&str> = scan.files.iter().map(|f| f.filename.as_str()).collect();
        for site in &scan.call_sites {
            if !filenames.contains(site.filename.as_str()) {
                return Err(StoreError::InconsistentScan(format!(
                    "call site in `{}` has no file record",
                    site.filename
                )));
            }
            if site.line_number == 0 {
                return Err(StoreError::InconsistentScan(format!(
                    "call site in `{}` has line number 0",
                    site.filename
                )));
            }
        }

        let repo = &scan.repo;
        let replaced = self.has_revision(&repo.repo_id, &repo.revision_id)?;

        let tx = self.conn.transaction()?;
        tx.execute(
            "DELETE FROM repos WHERE repo_id = ?1 AND revision_id = ?2",
            params![repo.repo_id, repo.revision_id],
        )?;
        tx.execute(
            "INSERT INTO repos (repo_id, revision_id, owner, clone_url, retrieval_date)
             VALUES (?1, ?2, ?3, ?4, ?5)",
            params![
                repo.repo_id,
                repo.revision_id,
                repo.owner,
                repo.clone_url,
                repo.retrieval_date.to_string(),
            ],
        )?;
        {
            let mut insert_file = tx.prepare(
                "INSERT INTO files (repo_id, revision_id, filename, openmp_lines, openacc_lines,
                                    cuda_lines, opencl_lines, c_lines, cpp_lines, fortran_lines,
                                    total_lines)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)",
            )?;
            for file in &scan.files {
                let c = &file.counts;
                insert_file.execute(params![
                    repo.repo_id,
                    repo.revision_id,
                    file.filename,
                    c.openmp,
                    c.openacc,
                    c.cuda,
                    c.opencl,
                    c.c,
                    c.cpp,
                    c.fortran,
                    c.total,
                ])?;
            }
            let mut insert_site = tx.prepare(
                "INSERT INTO call_sites (repo_id, revision_id, filename, collective, line_number)
                 VALUES (?1, ?2, ?3, ?4, ?5)",
            )?;
            for site in &scan.call_sites {
                insert_site.execute(params![
                    repo.repo_id,
                    repo.revision_id,
                    site.filename,
                    site.collective,
                    site.line_number,
                ])?;
            }
        }
        tx.commit()?;

        Ok(IngestSummary {
            files: scan.files.len() as u64,
            call_sites: scan.call_sites.len() as u64,
            replaced,
        })
    }

    /// Whether rows for this repository revision already exist.
    pub fn has_revision(&self, repo_id: &str, revision_id: &str) -> Result<bool, StoreError> {
        let found: Option<i64> = self
            .conn
            .query_row(
                "SELECT 1 FROM repos WHERE repo_id = ?1 AND revision_id = ?2",
                params![repo_id, revision_id],
                |row| row.get(0),
            )
            .optional()?;
        Ok(found.is_some())
    }

    /// Corpus-wide occurrence count for one collective in `set`.
    pub fn total_occurrences(
        &self,
        set: &CollectiveSet,
        collective: &str,
    ) -> Result<u64, StoreError> {
        if !set.contains(collective) {
            return Err(StoreError::UnknownCollective(collective.to_string()));
        }
        let count: i64 = self.conn.query_row(
            "SELECT COUNT(*) FROM call_sites WHERE collective = ?1",
            params![collective],
            |row| row.get(0),
        )?;
        Ok(count as u64)
    }

    /// Occurrence counts for every collective in `set`, descending by
    /// count with ties broken by name. Names with no sites appear with a
    /// zero count.
    pub fn occurrence_counts(
        &self,
        set: &CollectiveSet,
    ) -> Result<Vec<(String, u64)>, StoreError> {
        let mut by_name: BTreeMap<String, u64> =
            set.names().iter().map(|n| (n.clone(), 0)).collect();
        let mut stmt = self
            .conn
            .prepare("SELECT collective, COUNT(*) FROM call_sites GROUP BY collective")?;
        let rows = stmt.query_map([], |row| {
            Ok((row.get::<_, String>(0)?, row.get::<_, i64>(1)?))
        })?;
        for row in rows {
            let (name, count) = row?;
            if let Some(entry) = by_name.get_mut(&name) {
                *entry = count as u64;
            }
        }
        let mut counts: Vec<(String, u64)> = by_name.into_iter().collect();
        counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(counts)
    }

    /// Call sites grouped per file, each group sorted by line number then
    /// collective. Groups are ordered by (repo_id, revision_id, filename).
    /// Files without matching sites produce no group.
    pub fn call_sites_by_file(&self, filter: &SiteFilter) -> Result<Vec<FileSites>, StoreError> {
        let mut sql = String::from(
            "SELECT repo_id, revision_id, filename, collective, line_number FROM call_sites",
        );
        let mut clauses = Vec::new();
        let mut args: Vec<Box<dyn rusqlite::ToSql>> = Vec::new();
        if let Some(repo_id) = &filter.repo_id {
            clauses.push(format!("repo_id = ?{}", args.len() + 1));
            args.push(Box::new(repo_id.clone()));
        }
        if let Some(names) = &filter.collectives {
            let mut placeholders = Vec::new();
            for name in names {
                placeholders.push(format!("?{}", args.len() + 1));
                args.push(Box::new(name.clone()));
            }
            if placeholders.is_empty() {
                // An explicitly empty restriction matches nothing.
                return Ok(Vec::new());
            }
            clauses.push(format!("collective IN ({})", placeholders.join(", ")));
        }
        if !clauses.is_empty() {
            write!(sql, " WHERE {}", clauses.join(" AND ")).expect("write to String");
        }
        sql.push_str(" ORDER BY repo_id, revision_id, filename, line_number, collective");

        let mut stmt = self.conn.prepare(&sql)?;
        let params_ref: Vec<&dyn rusqlite::ToSql> = args.iter().map(|b| b.as_ref()).collect();
        let rows = stmt.query_map(params_ref.as_slice(), |row| {
            Ok((
                row.get::<_, String>(0)?,
                row.get::<_, String>(1)?,
                row.get::<_, String>(2)?,
                row.get::<_, String>(3)?,
                row.get::<_, i64>(4)?,
            ))
        })?;

        let mut groups: Vec<FileSites> = Vec::new();
        for row in rows {
            let (repo_id, revision_id, filename, collective, line_number) = row?;
            let site = Site {
                collective,
                line_number: line_number as u32,
            };
            match groups.last_mut() {
                Some(last)
                    if last.repo_id == repo_id
                        && last.revision_id == revision_id
                        && last.filename == filename =>
                {
                    last.sites.push(site);
                }
                _ => groups.push(FileSites {
                    repo_id,
                    revision_id,
                    filename,
                    sites: vec![site],
                }),
            }
        }
        Ok(groups)
    }

    /// Row counts as (repos, files, call_sites).
    pub fn row_counts(&self) -> Result<(u64, u64, u64), StoreError> {
        let count = |table: &str| -> Result<u64, StoreError> {
            let n: i64 = self
                .conn
                .query_row(&format!("SELECT COUNT(*) FROM {table}"), [], |row| {
                    row.get(0)
                })?;
            Ok(n as u64)
        };
        Ok((count("repos")?, count("files")?, count("call_sites")?))
    }

    /// Write one table as CSV and return the number of data rows.
    ///
    /// `Metadata` joins repository and file rows into the line-count
    /// table; `Collectives` lists every call site.
    pub fn export_csv(&self, table: ExportTable, path: &Path) -> Result<u64, StoreError> {
        let mut writer = csv::Writer::from_path(path).map_err(|source| StoreError::Export {
            path: path.to_path_buf(),
            source,
        })?;
        let mut written = 0u64;
        let map_csv = |source: csv::Error| StoreError::Export {
            path: path.to_path_buf(),
            source,
        };

        match table {
            ExportTable::Metadata => {
                writer
                    .write_record([
                        "Repo ID",
                        "Owner",
                        "Filename",
                        "Revision ID",
                        "Clone URL",
                        "Retrieval Date",
                        "OpenMP Lines",
                        "OpenACC Lines",
                        "CUDA Lines",
                        "OpenCL Lines",
                        "C Lines",
                        "CPP Lines",
                        "Fortran Lines",
                        "Total Lines",
                    ])
                    .map_err(map_csv)?;
                let mut stmt = self.conn.prepare(
                    "SELECT r.repo_id, r.owner, f.filename, r.revision_id, r.clone_url,
                            r.retrieval_date, f.openmp_lines, f.openacc_lines, f.cuda_lines,
                            f.opencl_lines, f.c_lines, f.cpp_lines, f.fortran_lines, f.total_lines
                     FROM files f
                     JOIN repos r ON r.repo_id = f.repo_id AND r.revision_id = f.revision_id
                     ORDER BY f.repo_id, f.revision_id, f.filename",
                )?;
                let mut rows = stmt.query([])?;
                while let Some(row) = rows.next()? {
                    let mut record = Vec::with_capacity(14);
                    for i in 0..6 {
                        record.push(row.get::<_, String>(i)?);
                    }
                    for i in 6..14 {
                        record.push(row.get::<_, i64>(i)?.to_string());
                    }
                    writer.write_record(&record).map_err(map_csv)?;
                    written += 1;
                }
            }
            ExportTable::Collectives => {
                writer
                    .write_record(["Repo ID", "Filename", "Collective Call", "Line Number"])
                    .map_err(map_csv)?;
                let mut stmt = self.conn.prepare(
                    "SELECT repo_id, filename, collective, line_number FROM call_sites
                     ORDER BY repo_id, revision_id, filename, line_number, collective",
                )?;
                let mut rows = stmt.query([])?;
                while let Some(row) = rows.next()? {
                    let record = [
                        row.get::<_, String>(0)?,
                        row.get::<_, String>(1)?,
                        row.get::<_, String>(2)?,
                        row.get::<_, i64>(3)?.to_string(),
                    ];
                    writer.write_record(&record).map_err(map_csv)?;
                    written += 1;
                }
            }
        }
        writer.flush().map_err(|e| StoreError::Export {
            path: path.to_path_buf(),
            source: csv::Error::from(e),
        })?;
        Ok(written)
    }

    /// SHA-256 over every row in canonical order; equal digests mean
    /// equal store content regardless of insertion history.
    pub fn content_digest(&self) -> Result<String, StoreError> {
        let mut hasher = Sha256::new();

        let mut stmt = self.conn.prepare(
            "SELECT repo_id, revision_id, owner, clone_url, retrieval_date FROM repos
             ORDER BY repo_id, revision_id",
        )?;
        let mut rows = stmt.query([])?;
        while let Some(row) = rows.next()? {
            let line = format!(
                "repo|{}|{}|{}|{}|{}\n",
                row.get::<_, String>(0)?,
                row.get::<_, String>(1)?,
                row.get::<_, String>(2)?,
                row.get::<_, String>(3)?,
                row.get::<_, String>(4)?,
            );
            hasher.update(line.as_bytes());
        }

        let mut stmt = self.conn.prepare(
            "SELECT repo_id, revision_id, filename, openmp_lines, openacc_lines, cuda_lines,
                    opencl_lines, c_lines, cpp_lines, fortran_lines, total_lines
             FROM files ORDER BY repo_id, revision_id, filename",
        )?;
        let mut rows = stmt.query([])?;
        while let Some(row) = rows.next()? {
            let mut line = format!(
                "file|{}|{}|{}",
                row.get::<_, String>(0)?,
                row.get::<_, String>(1)?,
                row.get::<_, String>(2)?,
            );
            for i in 3..11 {
                write!(line, "|{}", row.get::<_, i64>(i)?).expect("write to String");
            }
            line.push('\n');
            hasher.update(line.as_bytes());
        }

        let mut stmt = self.conn.prepare(
            "SELECT repo_id, revision_id, filename, collective, line_number FROM call_sites
             ORDER BY repo_id, revision_id, filename, line_number, collective",
        )?;
        let mut rows = stmt.query([])?;
        while let Some(row) = rows.next()? {
            let line = format!(
                "site|{}|{}|{}|{}|{}\n",
                row.get::<_, String>(0)?,
                row.get::<_, String>(1)?,
                row.get::<_, String>(2)?,
                row.get::<_, String>(3)?,
                row.get::<_, i64>(4)?,
            );
            hasher.update(line.as_bytes());
        }

        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").expect("write to String");
        }
        Ok(hex)
    }
}

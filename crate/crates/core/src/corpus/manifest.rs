//! Manifest serialization: JSON Lines, one entry per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use url::Url;

use super::{CorpusError, ManifestEntry};

/// Write entries as JSON Lines. The existing file, if any, is replaced.
pub fn write_manifest(entries: &[ManifestEntry], path: &Path) -> Result<(), CorpusError> {
    let file = File::create(path)
        .map_err(|e| CorpusError::io(format!("creating manifest {}", path.display()), e))?;
    let mut writer = BufWriter::new(file);
    for entry in entries {
        let line = serde_json::to_string(entry).map_err(|e| {
            CorpusError::io(
                format!("serializing manifest entry {}", entry.repo_id),
                e.into(),
            )
        })?;
        writeln!(writer, "{line}")
            .map_err(|e| CorpusError::io(format!("writing manifest {}", path.display()), e))?;
    }
    writer
        .flush()
        .map_err(|e| CorpusError::io(format!("writing manifest {}", path.display()), e))
}

/// Read a manifest back. Blank lines are ignored; anything else must be
/// a valid entry with an absolute clone URL.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let file = File::open(path)
        .map_err(|e| CorpusError::io(format!("opening manifest {}", path.display()), e))?;
    let reader = BufReader::new(file);
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line
            .map_err(|e| CorpusError::io(format!("reading manifest {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry =
            serde_json::from_str(&line).map_err(|e| CorpusError::InvalidManifest {
                line: line_no,
                detail: e.to_string(),
            })?;
        if Url::parse(&entry.clone_url).is_err() {
            return Err(CorpusError::InvalidManifest {
                line: line_no,
                detail: format!("clone_url `{}` is not an absolute URL", entry.clone_url),
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use std::collections::BTreeSet;

    fn entry(id: &str, owner: &str) -> ManifestEntry {
        ManifestEntry {
            repo_id: id.to_string(),
            owner: owner.to_string(),
            name: format!("repo-{id}"),
            clone_url: format!("https://example.invalid/{owner}/repo-{id}.git"),
            default_revision: "main".to_string(),
            matched_keywords: BTreeSet::from(["Allreduce".to_string(), "Bcast".to_string()]),
            retrieval_date: NaiveDate::from_ymd_opt(2026, 3, 4).unwrap(),
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        let entries = vec![entry("1", "alice"), entry("2", "bøb")];
        write_manifest(&entries, &path).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back, entries);
    }

    #[test]
    fn one_json_object_per_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        write_manifest(&[entry("1", "alice"), entry("2", "bob")], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        for line in lines {
            let value: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(value.get("repo_id").is_some());
            assert!(value.get("matched_keywords").unwrap().is_array());
        }
    }

    #[test]
    fn blank_lines_are_tolerated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        let one = serde_json::to_string(&entry("1", "alice")).unwrap();
        std::fs::write(&path, format!("{one}\n\n")).unwrap();
        assert_eq!(read_manifest(&path).unwrap().len(), 1);
    }

    #[test]
    fn bad_lines_are_rejected_with_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        let one = serde_json::to_string(&entry("1", "alice")).unwrap();
        std::fs::write(&path, format!("{one}\nnot json\n")).unwrap();
        let err = read_manifest(&path).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidManifest { line: 2, .. }));
    }

    #[test]
    fn relative_clone_urls_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        let mut bad = entry("1", "alice");
        bad.clone_url = "repos/local".to_string();
        let line = serde_json::to_string(&bad).unwrap();
        std::fs::write(&path, format!("{line}\n")).unwrap();
        let err = read_manifest(&path).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidManifest { line: 1, .. }));
    }
}

//! Report serialization.
//!
//! Every report comes in two shapes: CSV with a header row, and a
//! plot-friendly `.dat` variant with `#`-prefixed comment headers and
//! whitespace-separated columns, ready for gnuplot-style tooling.
//! Percentages are written with exactly one decimal place.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::patterns::{HomogeneityReport, PairSweepReport};

#[derive(Debug, Error)]
#[error("failed to write report to {path}: {source}")]
pub struct ReportError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Fusion percentages for one pair at one epsilon. `pcts` is `None` when
/// either member has no call sites, which leaves the ratio undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionRow {
    pub pair: (String, String),
    pub epsilon: u32,
    pub pcts: Option<(f64, f64)>,
}

/// `A:B` label used in report rows and file names.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("{a}:{b}")
}

fn open(path: &Path) -> Result<BufWriter<File>, ReportError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| ReportError {
            path: path.to_path_buf(),
            source,
        })
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), ReportError> {
    w.flush().map_err(|source| ReportError {
        path: path.to_path_buf(),
        source,
    })
}

macro_rules! emit {
    ($w:expr, $path:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|source| ReportError {
            path: $path.to_path_buf(),
            source,
        })?
    };
}

/// Pair co-occurrence counts per epsilon: `pair,epsilon,count`.
pub fn write_sweep_csv(path: &Path, reports: &[PairSweepReport]) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "pair,epsilon,count");
    for report in reports {
        let label = pair_label(&report.pair.0, &report.pair.1);
        for (epsilon, count) in &report.rows {
            emit!(w, path, "{label},{epsilon},{count}");
        }
    }
    finish(w, path)
}

/// Plot variant of [`write_sweep_csv`].
pub fn write_sweep_plot(path: &Path, reports: &[PairSweepReport]) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "# pair epsilon count");
    for report in reports {
        let label = pair_label(&report.pair.0, &report.pair.1);
        for (epsilon, count) in &report.rows {
            emit!(w, path, "{label} {epsilon} {count}");
        }
        emit!(w, path, "");
    }
    finish(w, path)
}

/// Homogeneity shares per pair:
/// `pair,adjacent_pairs,homogeneous_pct,mixed_pct`. Pairs without any
/// adjacent sites keep their row, with the percentage fields empty.
pub fn write_homogeneity_csv(
    path: &Path,
    reports: &[HomogeneityReport],
) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "pair,adjacent_pairs,homogeneous_pct,mixed_pct");
    for report in reports {
        let label = pair_label(&report.pair.0, &report.pair.1);
        match report.percentages() {
            Some((h, m)) => emit!(w, path, "{label},{},{h:.1},{m:.1}", report.total()),
            None => emit!(w, path, "{label},0,,"),
        }
    }
    finish(w, path)
}

/// Plot variant of [`write_homogeneity_csv`]. Undefined rows become
/// comments so numeric columns stay parseable.
pub fn write_homogeneity_plot(
    path: &Path,
    reports: &[HomogeneityReport],
) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "# pair adjacent_pairs homogeneous_pct mixed_pct");
    for report in reports {
        let label = pair_label(&report.pair.0, &report.pair.1);
        match report.percentages() {
            Some((h, m)) => emit!(w, path, "{label} {} {h:.1} {m:.1}", report.total()),
            None => emit!(w, path, "# {label} has no adjacent pairs"),
        }
    }
    finish(w, path)
}

/// Fusion percentages per pair and epsilon:
/// `pair,epsilon,first_pct,second_pct`.
pub fn write_fusion_csv(path: &Path, rows: &[FusionRow]) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "pair,epsilon,first_pct,second_pct");
    for row in rows {
        let label = pair_label(&row.pair.0, &row.pair.1);
        match row.pcts {
            Some((a, b)) => emit!(w, path, "{label},{},{a:.1},{b:.1}", row.epsilon),
            None => emit!(w, path, "{label},{},,", row.epsilon),
        }
    }
    finish(w, path)
}

/// Plot variant of [`write_fusion_csv`].
pub fn write_fusion_plot(path: &Path, rows: &[FusionRow]) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "# pair epsilon first_pct second_pct");
    for row in rows {
        let label = pair_label(&row.pair.0, &row.pair.1);
        match row.pcts {
            Some((a, b)) => emit!(w, path, "{label} {} {a:.1} {b:.1}", row.epsilon),
            None => emit!(w, path, "# {label} eps {} undefined (a collective has no sites)", row.epsilon),
        }
    }
    finish(w, path)
}

/// Occurrence counts: `collective,occurrences`, already ordered by the
/// caller (descending count, ties by name).
pub fn write_stats_csv(path: &Path, counts: &[(String, u64)]) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(w, path, "collective,occurrences");
    for (name, count) in counts {
        emit!(w, path, "{name},{count}");
    }
    finish(w, path)
}

/// Detected repeated groups, one row per group:
/// `repo_id,revision_id,filename,first_line,last_line,span,size,classification`.
pub fn write_groups_csv(
    path: &Path,
    groups: &[crate::patterns::PatternGroup],
) -> Result<(), ReportError> {
    let mut w = open(path)?;
    emit!(
        w,
        path,
        "repo_id,revision_id,filename,first_line,last_line,span,size,classification"
    );
    for group in groups {
        let first = group.sites.first().map(|s| s.line_number).unwrap_or(0);
        let last = group.sites.last().map(|s| s.line_number).unwrap_or(0);
        emit!(
            w,
            path,
            "{},{},{},{first},{last},{},{},{}",
            group.repo_id,
            group.revision_id,
            csv_field(&group.filename),
            group.span,
            group.size,
            group.classification.name()
        );
    }
    finish(w, path)
}

/// Quote a field the RFC 4180 way when it needs it.
fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

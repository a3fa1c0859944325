//! Per-file line counting.
//!
//! Lines are attributed to exactly one language bucket by file extension,
//! and directive lines (OpenMP, OpenACC) are counted on the raw text in
//! addition to their language bucket. The totals therefore satisfy
//! `total == physical lines`, `total == c + cpp + fortran + cuda + opencl`,
//! and `openmp + openacc <= total`.

use serde::{Deserialize, Serialize};

use super::language::Language;

/// Line counts for one file (or an aggregate over files).
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounts {
    pub openmp: u64,
    pub openacc: u64,
    pub cuda: u64,
    pub opencl: u64,
    pub c: u64,
    pub cpp: u64,
    pub fortran: u64,
    pub total: u64,
}

impl LineCounts {
    pub fn add(&mut self, other: &LineCounts) {
        self.openmp += other.openmp;
        self.openacc += other.openacc;
        self.cuda += other.cuda;
        self.opencl += other.opencl;
        self.c += other.c;
        self.cpp += other.cpp;
        self.fortran += other.fortran;
        self.total += other.total;
    }
}

/// Count physical lines and directive lines for one file.
///
/// A trailing newline does not start an extra line: `"a\nb\n"` and
/// `"a\nb"` both have two lines. Directive detection runs on the raw
/// line, before any comment stripping, because a directive is
/// syntactically a comment in Fortran and scanning raw text keeps the
/// count independent of stripping behavior.
pub fn count_lines(content: &str, language: Language) -> LineCounts {
    let mut counts = LineCounts::default();
    for line in content.lines() {
        counts.total += 1;
        match language {
            Language::C => counts.c += 1,
            Language::Cpp => counts.cpp += 1,
            Language::FortranFixed | Language::FortranFree => counts.fortran += 1,
            Language::Cuda => counts.cuda += 1,
            Language::OpenCl => counts.opencl += 1,
        }
        let directive = if language.is_fortran() {
            fortran_directive(line)
        } else {
            c_directive(line)
        };
        match directive {
            Some(Directive::OpenMp) => counts.openmp += 1,
            Some(Directive::OpenAcc) => counts.openacc += 1,
            None => {}
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Directive {
    OpenMp,
    OpenAcc,
}

/// `#pragma omp ...` / `#pragma acc ...`, allowing whitespace after `#`
/// and requiring whitespace between `pragma` and the directive name.
fn c_directive(line: &str) -> Option<Directive> {
    let rest = line.trim_start().strip_prefix('#')?;
    let rest = rest.trim_start().strip_prefix("pragma")?;
    let name = rest.trim_start();
    if name.len() == rest.len() {
        // No whitespace after `pragma`; identifiers like `pragmaomp` do
        // not introduce a directive.
        return None;
    }
    directive_name(name, false)
}

/// Fortran sentinels: `!$omp`, `c$omp`, `*$omp` (and `acc` variants),
/// case-insensitive, as the first non-blank token.
fn fortran_directive(line: &str) -> Option<Directive> {
    let trimmed = line.trim_start();
    let mut chars = trimmed.chars();
    let head = chars.next()?;
    if !matches!(head, '!' | 'c' | 'C' | '*') {
        return None;
    }
    let rest = chars.as_str().strip_prefix('$')?;
    directive_name(rest, true)
}

fn directive_name(text: &str, case_insensitive: bool) -> Option<Directive> {
    for (name, directive) in [("omp", Directive::OpenMp), ("acc", Directive::OpenAcc)] {
        let matched = if case_insensitive {
            text.len() >= name.len()
                && text.is_char_boundary(name.len())
                && text[..name.len()].eq_ignore_ascii_case(name)
        } else {
            text.starts_with(name)
        };
        if matched {
            let boundary_ok = text[name.len()..]
                .chars()
                .next()
                .map_or(true, |c| !c.is_ascii_alphanumeric() && c != '_');
            if boundary_ok {
                return Some(directive);
            }
        }
    }
    None
}

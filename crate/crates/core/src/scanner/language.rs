//! File-extension language classification.

use std::fmt;
use std::path::Path;

/// Source language of a scanned file, as determined by its extension.
///
/// Fortran is split by source form because the fixed-form comment rule
/// (a `c`, `C`, or `*` in column one comments the whole line) must not be
/// applied to free-form files, where code legitimately starts in column
/// one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    C,
    Cpp,
    FortranFixed,
    FortranFree,
    Cuda,
    OpenCl,
}

impl Language {
    pub fn is_fortran(self) -> bool {
        matches!(self, Language::FortranFixed | Language::FortranFree)
    }

    /// MPI token matching is case-insensitive for Fortran and
    /// case-sensitive for the C family.
    pub fn case_insensitive_tokens(self) -> bool {
        self.is_fortran()
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Language::C => "C",
            Language::Cpp => "C++",
            Language::FortranFixed | Language::FortranFree => "Fortran",
            Language::Cuda => "CUDA",
            Language::OpenCl => "OpenCL",
        };
        f.write_str(name)
    }
}

/// Classify a path by its file extension. Returns `None` for extensions
/// outside the source-language table (and for files with no extension),
/// which the scanner skips entirely.
///
/// The lookup is case-insensitive with one exception: an exact `.C`
/// follows the Unix convention and is C++, while every other casing of
/// `c` is C.
pub fn classify_file(path: &Path) -> Option<Language> {
    let ext = path.extension()?.to_str()?;
    if ext == "C" {
        return Some(Language::Cpp);
    }
    let lower = ext.to_ascii_lowercase();
    let lang = match lower.as_str() {
        "c" | "h" => Language::C,
        "cc" | "cpp" | "cxx" | "hpp" | "hh" => Language::Cpp,
        "f" | "for" | "f77" => Language::FortranFixed,
        "f90" | "f95" | "f03" => Language::FortranFree,
        "cu" | "cuh" => Language::Cuda,
        "cl" => Language::OpenCl,
        _ => return None,
    };
    Some(lang)
}

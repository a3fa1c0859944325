//! Call-site token extraction.
//!
//! Extraction runs on stripped text (see [`super::strip`]) and looks for
//! `MPI_<Name>` where `<Name>` is in the collective set and the token has
//! identifier boundaries on both sides. Matching is longest-name-first,
//! so `MPI_Gatherv` is `Gatherv` and never `Gather`, and `MPI_Allreduce`
//! is never `Reduce`. Nonblocking variants (`MPI_Iallreduce`) match no
//! set name and are ignored.

use crate::collectives::CollectiveSet;

use super::language::Language;

/// Find collective call sites in comment- and string-stripped source.
///
/// Returns `(collective, line_number)` pairs with 1-based line numbers,
/// ordered by line and then by column within the line. One pair is
/// produced per textual occurrence, so a line that calls the same
/// collective twice yields two pairs.
pub fn extract_call_sites(
    stripped: &str,
    language: Language,
    set: &CollectiveSet,
) -> Vec<(String, u32)> {
    let case_insensitive = language.case_insensitive_tokens();
    let mut sites = Vec::new();
    for (idx, line) in stripped.lines().enumerate() {
        let line_no = (idx + 1) as u32;
        let bytes = line.as_bytes();
        let mut matches: Vec<(usize, &str)> = Vec::new();
        scan_mpi_tokens(bytes, case_insensitive, set, &mut matches);
        if !set.aliases().is_empty() {
            scan_alias_tokens(bytes, case_insensitive, set, &mut matches);
        }
        matches.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        sites.extend(
            matches
                .into_iter()
                .map(|(_, name)| (name.to_string(), line_no)),
        );
    }
    sites
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn scan_mpi_tokens<'a>(
    bytes: &[u8],
    case_insensitive: bool,
    set: &'a CollectiveSet,
    matches: &mut Vec<(usize, &'a str)>,
) {
    let mut i = 0;
    while i + 4 <= bytes.len() {
        let prefix = &bytes[i..i + 4];
        let prefix_ok = if case_insensitive {
            prefix.eq_ignore_ascii_case(b"MPI_")
        } else {
            prefix == b"MPI_"
        };
        if !prefix_ok || (i > 0 && is_ident_byte(bytes[i - 1])) {
            i += 1;
            continue;
        }
        let after = i + 4;
        let mut hit = None;
        for (canonical, lower) in set.longest_first() {
            let len = canonical.len();
            if after + len > bytes.len() {
                continue;
            }
            let candidate = &bytes[after..after + len];
            let name_ok = if case_insensitive {
                candidate.eq_ignore_ascii_case(lower.as_bytes())
            } else {
                candidate == canonical.as_bytes()
            };
            if !name_ok {
                continue;
            }
            let end = after + len;
            if end < bytes.len() && is_ident_byte(bytes[end]) {
                continue;
            }
            hit = Some((canonical.as_str(), end));
            break;
        }
        match hit {
            Some((name, end)) => {
                matches.push((i, name));
                i = end;
            }
            None => i += 1,
        }
    }
}

fn scan_alias_tokens<'a>(
    bytes: &[u8],
    case_insensitive: bool,
    set: &'a CollectiveSet,
    matches: &mut Vec<(usize, &'a str)>,
) {
    for (token, token_lower, collective) in set.aliases() {
        let len = token.len();
        if len == 0 || len > bytes.len() {
            continue;
        }
        let mut i = 0;
        while i + len <= bytes.len() {
            let candidate = &bytes[i..i + len];
            let token_ok = if case_insensitive {
                candidate.eq_ignore_ascii_case(token_lower.as_bytes())
            } else {
                candidate == token.as_bytes()
            };
            let left_ok = i == 0 || !is_ident_byte(bytes[i - 1]);
            let right_ok = i + len == bytes.len() || !is_ident_byte(bytes[i + len]);
            if token_ok && left_ok && right_ok {
                matches.push((i, collective.as_str()));
                i += len;
            } else {
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extract(src: &str, language: Language) -> Vec<(String, u32)> {
        extract_call_sites(src, language, &CollectiveSet::default_set())
    }

    fn c(src: &str) -> Vec<(String, u32)> {
        extract(src, Language::C)
    }

    #[test]
    fn basic_call_with_mpi_constants() {
        let sites = c("MPI_Allreduce(&a, &b, 1, MPI_DOUBLE, MPI_SUM, comm);\n");
        assert_eq!(sites, vec![("Allreduce".to_string(), 1)]);
    }

    #[test]
    fn longest_name_wins() {
        assert_eq!(c("MPI_Gatherv(a);\n"), vec![("Gatherv".to_string(), 1)]);
        assert_eq!(c("MPI_Allgather(a);\n"), vec![("Allgather".to_string(), 1)]);
        assert_eq!(c("MPI_Alltoallv(a);\n"), vec![("Alltoallv".to_string(), 1)]);
        assert_eq!(c("MPI_Allreduce(a);\n"), vec![("Allreduce".to_string(), 1)]);
        assert_eq!(c("MPI_Reduce(a);\n"), vec![("Reduce".to_string(), 1)]);
    }

    #[test]
    fn identifier_boundaries_are_enforced() {
        assert!(c("XMPI_Bcast(a);\n").is_empty());
        assert!(c("MPI_Bcastx(a);\n").is_empty());
        assert!(c("MPI_Bcast_init(a);\n").is_empty());
        assert!(c("my_MPI_Bcast(a);\n").is_empty());
        assert_eq!(c("(MPI_Bcast(a));\n"), vec![("Bcast".to_string(), 1)]);
    }

    #[test]
    fn nonblocking_variants_do_not_match() {
        assert!(c("MPI_Iallreduce(a);\n").is_empty());
        assert!(c("MPI_Ibcast(a);\n").is_empty());
        assert!(c("MPI_Igatherv(a);\n").is_empty());
    }

    #[test]
    fn c_family_matching_is_case_sensitive() {
        assert!(c("mpi_bcast(a);\n").is_empty());
        assert!(c("MPI_BCAST(a);\n").is_empty());
        assert_eq!(c("MPI_Bcast(a);\n"), vec![("Bcast".to_string(), 1)]);
    }

    #[test]
    fn fortran_matching_is_case_insensitive_and_canonicalizes() {
        let sites = extract(
            "      CALL MPI_ALLREDUCE(A, B, 1, MPI_REAL, MPI_SUM, C, IERR)\n      call mpi_barrier(comm, ierr)\n",
            Language::FortranFixed,
        );
        assert_eq!(
            sites,
            vec![("Allreduce".to_string(), 1), ("Barrier".to_string(), 2)]
        );
    }

    #[test]
    fn multiple_sites_on_one_line_ordered_by_column() {
        let sites = c("MPI_Gather(a); MPI_Scatter(b);\n");
        assert_eq!(
            sites,
            vec![("Gather".to_string(), 1), ("Scatter".to_string(), 1)]
        );
        let sites = c("MPI_Scatter(a); MPI_Gather(b);\n");
        assert_eq!(
            sites,
            vec![("Scatter".to_string(), 1), ("Gather".to_string(), 1)]
        );
    }

    #[test]
    fn repeated_name_on_one_line_yields_one_pair_each() {
        let sites = c("MPI_Bcast(a); MPI_Bcast(b);\n");
        assert_eq!(
            sites,
            vec![("Bcast".to_string(), 1), ("Bcast".to_string(), 1)]
        );
    }

    #[test]
    fn line_numbers_are_one_based() {
        let sites = c("\n\nMPI_Barrier(comm);\n");
        assert_eq!(sites, vec![("Barrier".to_string(), 3)]);
    }

    #[test]
    fn names_outside_the_set_are_ignored() {
        let set = CollectiveSet::new(vec!["Bcast".to_string()]).unwrap();
        let sites = extract_call_sites("MPI_Allreduce(a); MPI_Bcast(b);\n", Language::C, &set);
        assert_eq!(sites, vec![("Bcast".to_string(), 1)]);
    }

    #[test]
    fn gather_does_not_match_gatherv_or_allgather_text() {
        let set = CollectiveSet::new(vec!["Gather".to_string()]).unwrap();
        assert!(extract_call_sites("MPI_Gatherv(a);\n", Language::C, &set).is_empty());
        assert!(extract_call_sites("MPI_Allgather(a);\n", Language::C, &set).is_empty());
    }

    #[test]
    fn alias_tokens_map_to_their_collective() {
        let set = CollectiveSet::with_aliases(
            vec!["Allreduce".to_string(), "Bcast".to_string()],
            vec![("par_sum".to_string(), "Allreduce".to_string())],
        )
        .unwrap();
        let sites = extract_call_sites(
            "par_sum(x);\nMPI_Bcast(y);\nxpar_sum(z); par_sum_all(w);\n",
            Language::C,
            &set,
        );
        assert_eq!(
            sites,
            vec![("Allreduce".to_string(), 1), ("Bcast".to_string(), 2)]
        );
    }

    #[test]
    fn alias_and_mpi_match_on_one_line_are_column_ordered() {
        let set = CollectiveSet::with_aliases(
            vec!["Allreduce".to_string(), "Bcast".to_string()],
            vec![("par_sum".to_string(), "Allreduce".to_string())],
        )
        .unwrap();
        let sites = extract_call_sites("MPI_Bcast(a); par_sum(b);\n", Language::C, &set);
        assert_eq!(
            sites,
            vec![("Bcast".to_string(), 1), ("Allreduce".to_string(), 1)]
        );
    }
}

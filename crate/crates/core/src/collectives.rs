//! Collective name sets.
//!
//! A [`CollectiveSet`] holds the base names (`Allreduce`, `Bcast`, ...)
//! that the scanner recognizes after an `MPI_` prefix and that the pattern
//! engine accepts in queries. Matching across overlapping names is
//! longest-first, so `MPI_Allgatherv` never counts as `Allgather` when
//! both are in the set, and `MPI_Allreduce` never counts as `Reduce`.

use thiserror::Error;

/// The nine collective names used as repository-search keywords by default.
pub const DEFAULT_SEARCH_KEYWORDS: [&str; 9] = [
    "Allgather",
    "Allreduce",
    "Alltoallv",
    "Barrier",
    "Gather",
    "Gatherv",
    "Reduce",
    "Scatter",
    "Scatterv",
];

/// The eleven collective base names recognized by default.
pub const DEFAULT_COLLECTIVES: [&str; 11] = [
    "Allgather",
    "Allreduce",
    "Alltoall",
    "Alltoallv",
    "Barrier",
    "Bcast",
    "Gather",
    "Gatherv",
    "Reduce",
    "Scatter",
    "Scatterv",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CollectivesError {
    #[error("collective set must contain at least one name")]
    Empty,
    #[error("invalid collective name `{0}`: names are non-empty identifiers")]
    InvalidName(String),
    #[error("duplicate collective name `{0}` (names are case-insensitive)")]
    Duplicate(String),
    #[error("alias `{alias}` targets `{target}`, which is not in the set")]
    UnknownAliasTarget { alias: String, target: String },
}

/// An ordered set of collective base names with an optional alias table.
///
/// Aliases map whole wrapper identifiers (for example a site-local
/// `par_allreduce`) to a collective in the set, so wrapped call sites can
/// be attributed without changing the token grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectiveSet {
    names: Vec<String>,
    // (canonical, lowercased) ordered by length descending then name, so a
    // scan can take the first boundary-valid match and be done.
    longest_first: Vec<(String, String)>,
    // (token, lowercased token, canonical collective)
    aliases: Vec<(String, String, String)>,
}

impl CollectiveSet {
    /// The default eleven-name set with no aliases.
    pub fn default_set() -> Self {
        Self::new(DEFAULT_COLLECTIVES.iter().map(|s| s.to_string()))
            .expect("default collective names are valid")
    }

    pub fn new(names: impl IntoIterator<Item = String>) -> Result<Self, CollectivesError> {
        Self::with_aliases(names, std::iter::empty())
    }

    pub fn with_aliases(
        names: impl IntoIterator<Item = String>,
        aliases: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, CollectivesError> {
        let mut names: Vec<String> = names.into_iter().collect();
        if names.is_empty() {
            return Err(CollectivesError::Empty);
        }
        for name in &names {
            if !is_identifier(name) {
                return Err(CollectivesError::InvalidName(name.clone()));
            }
        }
        names.sort();
        for pair in names.windows(2) {
            if pair[0].eq_ignore_ascii_case(&pair[1]) {
                return Err(CollectivesError::Duplicate(pair[1].clone()));
            }
        }

        let mut longest_first: Vec<(String, String)> = names
            .iter()
            .map(|n| (n.clone(), n.to_ascii_lowercase()))
            .collect();
        longest_first.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

        let mut resolved_aliases = Vec::new();
        for (token, target) in aliases {
            if !is_identifier(&token) {
                return Err(CollectivesError::InvalidName(token));
            }
            match names.iter().find(|n| n.eq_ignore_ascii_case(&target)) {
                Some(canonical) => {
                    resolved_aliases.push((
                        token.clone(),
                        token.to_ascii_lowercase(),
                        canonical.clone(),
                    ));
                }
                None => {
                    return Err(CollectivesError::UnknownAliasTarget {
                        alias: token,
                        target,
                    })
                }
            }
        }
        resolved_aliases.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

        Ok(Self {
            names,
            longest_first,
            aliases: resolved_aliases,
        })
    }

    /// All names, sorted ascending.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Case-insensitive lookup returning the canonical spelling.
    pub fn resolve(&self, name: &str) -> Option<&str> {
        self.names
            .iter()
            .find(|n| n.eq_ignore_ascii_case(name))
            .map(|n| n.as_str())
    }

    /// `(canonical, lowercased)` pairs ordered longest name first.
    pub(crate) fn longest_first(&self) -> &[(String, String)] {
        &self.longest_first
    }

    /// `(token, lowercased token, canonical collective)` triples, longest
    /// token first.
    pub(crate) fn aliases(&self) -> &[(String, String, String)] {
        &self.aliases
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && !s.as_bytes()[0].is_ascii_digit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_has_all_names_sorted() {
        let set = CollectiveSet::default_set();
        assert_eq!(set.names().len(), 11);
        let mut sorted = set.names().to_vec();
        sorted.sort();
        assert_eq!(set.names(), sorted.as_slice());
        assert!(set.contains("Allreduce"));
        assert!(set.contains("Bcast"));
        assert!(!set.contains("Iallreduce"));
    }

    #[test]
    fn longest_first_orders_overlapping_names() {
        let set = CollectiveSet::default_set();
        let order: Vec<&str> = set.longest_first().iter().map(|(n, _)| n.as_str()).collect();
        let pos = |n: &str| order.iter().position(|x| *x == n).unwrap();
        assert!(pos("Allgather") < pos("Gather"));
        assert!(pos("Gatherv") < pos("Gather"));
        assert!(pos("Alltoallv") < pos("Alltoall"));
        assert!(pos("Allreduce") < pos("Reduce"));
    }

    #[test]
    fn resolve_is_case_insensitive() {
        let set = CollectiveSet::default_set();
        assert_eq!(set.resolve("allREDUCE"), Some("Allreduce"));
        assert_eq!(set.resolve("bcast"), Some("Bcast"));
        assert_eq!(set.resolve("Send"), None);
    }

    #[test]
    fn rejects_empty_and_invalid() {
        assert_eq!(
            CollectiveSet::new(std::iter::empty()),
            Err(CollectivesError::Empty)
        );
        let err = CollectiveSet::new(vec!["All reduce".to_string()]).unwrap_err();
        assert!(matches!(err, CollectivesError::InvalidName(_)));
        let err =
            CollectiveSet::new(vec!["Bcast".to_string(), "bcast".to_string()]).unwrap_err();
        assert!(matches!(err, CollectivesError::Duplicate(_)));
    }

    #[test]
    fn alias_targets_must_exist() {
        let ok = CollectiveSet::with_aliases(
            vec!["Allreduce".to_string()],
            vec![("par_allreduce".to_string(), "Allreduce".to_string())],
        )
        .unwrap();
        assert_eq!(ok.aliases().len(), 1);
        assert_eq!(ok.aliases()[0].2, "Allreduce");

        let err = CollectiveSet::with_aliases(
            vec!["Allreduce".to_string()],
            vec![("x".to_string(), "Bcast".to_string())],
        )
        .unwrap_err();
        assert!(matches!(err, CollectivesError::UnknownAliasTarget { .. }));
    }
}

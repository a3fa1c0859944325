//! Repeated-collective pattern analysis.
//!
//! A repeated group is a run of at least `delta` call sites from a name
//! set, all in one file, whose line span (last line minus first line)
//! stays within `epsilon`. Groups are formed greedily left to right:
//! each run is extended until the next site would push the span past
//! `epsilon`, then the next run starts after it, so no site lands in
//! two groups. A missing `epsilon` means the span is unbounded.
//!
//! Pair analyses count unordered site pairs `(a_site, b_site)` whose
//! line distance is at most `epsilon`, fusion ratios measure what share
//! of a collective's sites has a partner within `epsilon`, and the
//! homogeneity distribution classifies adjacent pairs of the per-file
//! site sequence restricted to the two names, with no distance bound.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::collectives::CollectiveSet;
use crate::store::{FileSites, Site, SiteFilter, Store, StoreError};

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("a pattern query needs at least one collective name")]
    EmptyNames,
    #[error("delta must be at least 2 (a repeat needs two sites), got {0}")]
    DeltaTooSmall(usize),
    #[error("pair members must differ, got `{0}` twice")]
    SamePair(String),
    #[error("an epsilon sweep needs at least one epsilon value")]
    EmptyEpsilons,
    #[error("call sites must be sorted by line number")]
    UnsortedSites,
    #[error("a group needs at least two sites to classify, got {0}")]
    GroupTooSmall(usize),
    #[error("collective `{0}` has no call sites, so its ratio denominator is zero")]
    ZeroDenominator(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Validated parameters for repeated-group detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternQuery {
    names: BTreeSet<String>,
    epsilon: Option<u32>,
    delta: usize,
}

impl PatternQuery {
    /// `epsilon` of `None` leaves the span unbounded. `delta` is the
    /// minimum group size and must be at least 2.
    pub fn new(
        names: impl IntoIterator<Item = String>,
        epsilon: Option<u32>,
        delta: usize,
    ) -> Result<Self, PatternError> {
        let names: BTreeSet<String> = names.into_iter().collect();
        if names.is_empty() {
            return Err(PatternError::EmptyNames);
        }
        if delta < 2 {
            return Err(PatternError::DeltaTooSmall(delta));
        }
        Ok(PatternQuery {
            names,
            epsilon,
            delta,
        })
    }

    pub fn names(&self) -> &BTreeSet<String> {
        &self.names
    }

    pub fn epsilon(&self) -> Option<u32> {
        self.epsilon
    }

    pub fn delta(&self) -> usize {
        self.delta
    }
}

/// Whether a group repeats one collective or mixes several.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Homogeneous,
    Mixed,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Homogeneous => "homogeneous",
            Classification::Mixed => "mixed",
        }
    }
}

/// One detected repeated group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGroup {
    pub repo_id: String,
    pub revision_id: String,
    pub filename: String,
    /// Member sites ordered by line number.
    pub sites: Vec<Site>,
    /// Last line minus first line.
    pub span: u32,
    pub size: usize,
    pub classification: Classification,
}

/// Pair counts over a sweep of epsilon values, rows ascending by epsilon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSweepReport {
    pub pair: (String, String),
    pub rows: Vec<(u32, u64)>,
}

/// Corpus-wide homogeneous/mixed tallies for one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub pair: (String, String),
    pub homogeneous: u64,
    pub mixed: u64,
}

impl HomogeneityReport {
    pub fn total(&self) -> u64 {
        self.homogeneous + self.mixed
    }

    /// `(homogeneous_pct, mixed_pct)` rounded to one decimal place, or
    /// `None` when there are no adjacent pairs at all. The homogeneous
    /// share is rounded half-up and the mixed share is its complement,
    /// so at one-decimal precision the two always sum to 100.0 (the
    /// underlying tenths sum to exactly 1000).
    pub fn percentages(&self) -> Option<(f64, f64)> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let h = percent_tenths(self.homogeneous, total);
        Some((h as f64 / 10.0, (1000 - h) as f64 / 10.0))
    }
}

/// `100 * numer / denom` in tenths of a percent, rounded half-up.
fn percent_tenths(numer: u64, denom: u64) -> u64 {
    debug_assert!(denom > 0);
    debug_assert!(numer <= denom);
    ((2000u128 * numer as u128 + denom as u128) / (2 * denom as u128)) as u64
}

fn percent(numer: u64, denom: u64) -> f64 {
    percent_tenths(numer, denom) as f64 / 10.0
}

fn ensure_sorted(sites: &[Site]) -> Result<(), PatternError> {
    if sites
        .windows(2)
        .all(|w| w[0].line_number <= w[1].line_number)
    {
        Ok(())
    } else {
        Err(PatternError::UnsortedSites)
    }
}

/// Detect repeated groups in one file's call sites.
///
/// `file.sites` must be sorted by line number. Sites whose collective is
/// outside the query's name set are invisible to grouping: they neither
/// join a group nor break one up.
pub fn find_repeated_groups(
    file: &FileSites,
    query: &PatternQuery,
) -> Result<Vec<PatternGroup>, PatternError> {
    ensure_sorted(&file.sites)?;
    let restricted: Vec<&Site> = file
        .sites
        .iter()
        .filter(|s| query.names().contains(&s.collective))
        .collect();

    let mut groups = Vec::new();
    let mut start = 0;
    while start < restricted.len() {
        let first_line = restricted[start].line_number;
        let mut end = start;
        while end + 1 < restricted.len() {
            let span = restricted[end + 1].line_number - first_line;
            let fits = match query.epsilon() {
                None => true,
                Some(eps) => span <= eps,
            };
            if !fits {
                break;
            }
            end += 1;
        }
        let size = end - start + 1;
        if size >= query.delta() {
            let sites: Vec<Site> = restricted[start..=end].iter().map(|s| (*s).clone()).collect();
            let span = sites[sites.len() - 1].line_number - sites[0].line_number;
            let classification = classify_group(&sites)?;
            groups.push(PatternGroup {
                repo_id: file.repo_id.clone(),
                revision_id: file.revision_id.clone(),
                filename: file.filename.clone(),
                sites,
                span,
                size,
                classification,
            });
        }
        start = end + 1;
    }
    Ok(groups)
}

/// Homogeneous when every site names the same collective.
pub fn classify_group(sites: &[Site]) -> Result<Classification, PatternError> {
    if sites.len() < 2 {
        return Err(PatternError::GroupTooSmall(sites.len()));
    }
    let first = &sites[0].collective;
    if sites.iter().all(|s| &s.collective == first) {
        Ok(Classification::Homogeneous)
    } else {
        Ok(Classification::Mixed)
    }
}

/// Count unordered `(a_site, b_site)` pairs within `epsilon` lines in one
/// file's sites. Every qualifying combination counts, so one `a` site
/// near two `b` sites contributes two pairs.
pub fn count_pair_cooccurrences(
    sites: &[Site],
    a: &str,
    b: &str,
    epsilon: u32,
) -> Result<u64, PatternError> {
    if a == b {
        return Err(PatternError::SamePair(a.to_string()));
    }
    let a_lines = lines_of(sites, a);
    let b_lines = lines_of(sites, b);
    let mut count = 0u64;
    for &line in &a_lines {
        let lo = line.saturating_sub(epsilon);
        let hi = line.saturating_add(epsilon);
        let lower = b_lines.partition_point(|&x| x < lo);
        let upper = b_lines.partition_point(|&x| x <= hi);
        count += (upper - lower) as u64;
    }
    Ok(count)
}

fn lines_of(sites: &[Site], name: &str) -> Vec<u32> {
    let mut lines: Vec<u32> = sites
        .iter()
        .filter(|s| s.collective == name)
        .map(|s| s.line_number)
        .collect();
    lines.sort_unstable();
    lines
}

/// Corpus-wide pair counts for every `(pair, epsilon)` combination.
///
/// Epsilons are sorted ascending and deduplicated; each pair yields one
/// report whose rows follow that order.
pub fn sweep_epsilon(
    store: &Store,
    pairs: &[(String, String)],
    epsilons: &[u32],
) -> Result<Vec<PairSweepReport>, PatternError> {
    if epsilons.is_empty() {
        return Err(PatternError::EmptyEpsilons);
    }
    let mut eps = epsilons.to_vec();
    eps.sort_unstable();
    eps.dedup();

    let mut reports = Vec::new();
    for (a, b) in pairs {
        if a == b {
            return Err(PatternError::SamePair(a.clone()));
        }
        let groups = store.call_sites_by_file(&SiteFilter::collectives([a.clone(), b.clone()]))?;
        let mut rows = Vec::with_capacity(eps.len());
        for &epsilon in &eps {
            let mut total = 0u64;
            for group in &groups {
                total += count_pair_cooccurrences(&group.sites, a, b, epsilon)?;
            }
            rows.push((epsilon, total));
        }
        reports.push(PairSweepReport {
            pair: (a.clone(), b.clone()),
            rows,
        });
    }
    Ok(reports)
}

/// Percentage of each pair member's sites that have at least one site of
/// the other member within `epsilon` lines in the same file.
///
/// Returns `(pct_a, pct_b)` rounded half-up to one decimal place. A
/// member with zero sites corpus-wide has an undefined ratio and is an
/// error, as is a name outside `set`.
pub fn fusion_ratio(
    store: &Store,
    set: &CollectiveSet,
    a: &str,
    b: &str,
    epsilon: u32,
) -> Result<(f64, f64), PatternError> {
    if a == b {
        return Err(PatternError::SamePair(a.to_string()));
    }
    let total_a = store.total_occurrences(set, a)?;
    let total_b = store.total_occurrences(set, b)?;
    if total_a == 0 {
        return Err(PatternError::ZeroDenominator(a.to_string()));
    }
    if total_b == 0 {
        return Err(PatternError::ZeroDenominator(b.to_string()));
    }

    let groups = store.call_sites_by_file(&SiteFilter::collectives([a.to_string(), b.to_string()]))?;
    let mut fused_a = 0u64;
    let mut fused_b = 0u64;
    for group in &groups {
        let a_lines = lines_of(&group.sites, a);
        let b_lines = lines_of(&group.sites, b);
        fused_a += a_lines
            .iter()
            .filter(|&&line| has_within(&b_lines, line, epsilon))
            .count() as u64;
        fused_b += b_lines
            .iter()
            .filter(|&&line| has_within(&a_lines, line, epsilon))
            .count() as u64;
    }
    Ok((percent(fused_a, total_a), percent(fused_b, total_b)))
}

fn has_within(sorted_lines: &[u32], line: u32, epsilon: u32) -> bool {
    let lo = line.saturating_sub(epsilon);
    let hi = line.saturating_add(epsilon);
    let lower = sorted_lines.partition_point(|&x| x < lo);
    lower < sorted_lines.len() && sorted_lines[lower] <= hi
}

/// Classify adjacent pairs of each file's site sequence restricted to
/// `{a, b}`, with no distance bound, and tally corpus-wide.
pub fn homogeneity_distribution(
    store: &Store,
    a: &str,
    b: &str,
) -> Result<HomogeneityReport, PatternError> {
    if a == b {
        return Err(PatternError::SamePair(a.to_string()));
    }
    let groups = store.call_sites_by_file(&SiteFilter::collectives([a.to_string(), b.to_string()]))?;
    let mut homogeneous = 0u64;
    let mut mixed = 0u64;
    for group in &groups {
        for window in group.sites.windows(2) {
            if window[0].collective == window[1].collective {
                homogeneous += 1;
            } else {
                mixed += 1;
            }
        }
    }
    Ok(HomogeneityReport {
        pair: (a.to_string(), b.to_string()),
        homogeneous,
        mixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scanner::{CallSite, FileRecord, LineCounts, ScanResult};
    use crate::store::RepoRecord;

    fn site(name: &str, line: u32) -> Site {
        Site {
            collective: name.to_string(),
            line_number: line,
        }
    }

    fn file_sites(sites: Vec<Site>) -> FileSites {
        FileSites {
            repo_id: "1".to_string(),
            revision_id: "r1".to_string(),
            filename: "a.c".to_string(),
            sites,
        }
    }

    fn query(names: &[&str], epsilon: Option<u32>, delta: usize) -> PatternQuery {
        PatternQuery::new(names.iter().map(|s| s.to_string()), epsilon, delta).unwrap()
    }

    fn seeded_store(sites: &[(&str, &str, u32)]) -> Store {
        let mut filenames: Vec<&str> = sites.iter().map(|(f, _, _)| *f).collect();
        filenames.sort();
        filenames.dedup();
        let scan = ScanResult {
            repo: RepoRecord {
                repo_id: "1".to_string(),
                owner: "octo".to_string(),
                revision_id: "r1".to_string(),
                clone_url: "https://example.invalid/octo/demo.git".to_string(),
                retrieval_date: chrono::NaiveDate::from_ymd_opt(2026, 2, 1).unwrap(),
            },
            files: filenames
                .iter()
                .map(|f| FileRecord {
                    repo_id: "1".to_string(),
                    filename: f.to_string(),
                    counts: LineCounts {
                        c: 10_000,
                        total: 10_000,
                        ..LineCounts::default()
                    },
                })
                .collect(),
            call_sites: sites
                .iter()
                .map(|(f, name, line)| CallSite {
                    repo_id: "1".to_string(),
                    filename: f.to_string(),
                    collective: name.to_string(),
                    line_number: *line,
                })
                .collect(),
            log: Vec::new(),
        };
        let mut store = Store::open_in_memory().unwrap();
        store.ingest(&scan).unwrap();
        store
    }

    #[test]
    fn query_validation() {
        assert!(matches!(
            PatternQuery::new(std::iter::empty(), None, 2),
            Err(PatternError::EmptyNames)
        ));
        assert!(matches!(
            PatternQuery::new(vec!["Bcast".to_string()], None, 1),
            Err(PatternError::DeltaTooSmall(1))
        ));
        assert!(PatternQuery::new(vec!["Bcast".to_string()], Some(0), 2).is_ok());
    }

    #[test]
    fn greedy_grouping_stops_at_span() {
        // Lines 10, 30, 100 with eps 25: 30 joins (span 20), 100 would
        // make the span 90, so exactly one group forms.
        let file = file_sites(vec![site("Bcast", 10), site("Bcast", 30), site("Bcast", 100)]);
        let groups = find_repeated_groups(&file, &query(&["Bcast"], Some(25), 2)).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].size, 2);
        assert_eq!(groups[0].span, 20);
        assert_eq!(groups[0].classification, Classification::Homogeneous);
        assert_eq!(
            groups[0].sites.iter().map(|s| s.line_number).collect::<Vec<_>>(),
            vec![10, 30]
        );
    }

    #[test]
    fn unbounded_epsilon_groups_everything() {
        let file = file_sites(vec![site("Bcast", 10), site("Bcast", 30), site("Bcast", 100)]);
        let groups = find_repeated_groups(&file, &query(&["Bcast"], None, 2)).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].size, 3);
        assert_eq!(groups[0].span, 90);
    }

    #[test]
    fn delta_filters_small_runs() {
        let file = file_sites(vec![site("Bcast", 10), site("Bcast", 30), site("Bcast", 100)]);
        let groups = find_repeated_groups(&file, &query(&["Bcast"], Some(25), 3)).unwrap();
        assert!(groups.is_empty());
    }

    #[test]
    fn greedy_runs_do_not_overlap() {
        let file = file_sites(vec![
            site("Reduce", 1),
            site("Reduce", 5),
            site("Reduce", 9),
            site("Reduce", 13),
        ]);
        let groups = find_repeated_groups(&file, &query(&["Reduce"], Some(4), 2)).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(
            groups[0].sites.iter().map(|s| s.line_number).collect::<Vec<_>>(),
            vec![1, 5]
        );
        assert_eq!(
            groups[1].sites.iter().map(|s| s.line_number).collect::<Vec<_>>(),
            vec![9, 13]
        );
    }

    #[test]
    fn close_pair_of_same_collective_is_homogeneous() {
        let file = file_sites(vec![site("Allreduce", 93), site("Allreduce", 98)]);
        let groups = find_repeated_groups(&file, &query(&["Allreduce"], Some(5), 2)).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].span, 5);
        assert_eq!(groups[0].classification, Classification::Homogeneous);
    }

    #[test]
    fn two_name_window_classifies_mixed() {
        let file = file_sites(vec![
            site("Allreduce", 200),
            site("Allreduce", 217),
            site("Allgather", 227),
            site("Allgather", 230),
        ]);
        let groups =
            find_repeated_groups(&file, &query(&["Allreduce", "Allgather"], Some(30), 2)).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].size, 4);
        assert_eq!(groups[0].span, 30);
        assert_eq!(groups[0].classification, Classification::Mixed);
    }

    #[test]
    fn names_outside_the_query_are_invisible() {
        let file = file_sites(vec![
            site("Bcast", 10),
            site("Barrier", 12),
            site("Bcast", 14),
        ]);
        let groups = find_repeated_groups(&file, &query(&["Bcast"], Some(4), 2)).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].size, 2);
        assert_eq!(
            groups[0].sites.iter().map(|s| s.collective.as_str()).collect::<Vec<_>>(),
            vec!["Bcast", "Bcast"]
        );
    }

    #[test]
    fn unsorted_sites_are_rejected() {
        let file = file_sites(vec![site("Bcast", 30), site("Bcast", 10)]);
        let err = find_repeated_groups(&file, &query(&["Bcast"], None, 2)).unwrap_err();
        assert!(matches!(err, PatternError::UnsortedSites));
    }

    #[test]
    fn classify_needs_two_sites() {
        assert!(matches!(
            classify_group(&[site("Bcast", 1)]),
            Err(PatternError::GroupTooSmall(1))
        ));
        assert_eq!(
            classify_group(&[site("Bcast", 1), site("Bcast", 2)]).unwrap(),
            Classification::Homogeneous
        );
        assert_eq!(
            classify_group(&[site("Bcast", 1), site("Reduce", 2)]).unwrap(),
            Classification::Mixed
        );
    }

    #[test]
    fn pair_counting_matches_hand_enumeration() {
        let sites = vec![site("Gather", 10), site("Gather", 20), site("Scatter", 15)];
        // (10,15) and (20,15) both within 5 lines.
        assert_eq!(count_pair_cooccurrences(&sites, "Gather", "Scatter", 5).unwrap(), 2);
        assert_eq!(count_pair_cooccurrences(&sites, "Gather", "Scatter", 4).unwrap(), 0);
        // eps 0 means same line only.
        let same_line = vec![site("Gather", 7), site("Scatter", 7)];
        assert_eq!(count_pair_cooccurrences(&same_line, "Gather", "Scatter", 0).unwrap(), 1);
    }

    #[test]
    fn pair_counting_is_symmetric() {
        let sites = vec![
            site("Gather", 3),
            site("Scatter", 5),
            site("Gather", 9),
            site("Scatter", 30),
            site("Gather", 31),
        ];
        for eps in [0, 2, 5, 10, 100] {
            assert_eq!(
                count_pair_cooccurrences(&sites, "Gather", "Scatter", eps).unwrap(),
                count_pair_cooccurrences(&sites, "Scatter", "Gather", eps).unwrap()
            );
        }
    }

    #[test]
    fn identical_pair_members_are_rejected() {
        let sites = vec![site("Gather", 1)];
        assert!(matches!(
            count_pair_cooccurrences(&sites, "Gather", "Gather", 5),
            Err(PatternError::SamePair(_))
        ));
    }

    #[test]
    fn sweep_orders_and_dedups_epsilons() {
        let store = seeded_store(&[
            ("a.c", "Gather", 10),
            ("a.c", "Scatter", 15),
            ("a.c", "Gather", 60),
            ("b.c", "Scatter", 100),
            ("b.c", "Gather", 102),
        ]);
        let pairs = vec![("Gather".to_string(), "Scatter".to_string())];
        let reports = sweep_epsilon(&store, &pairs, &[50, 5, 0, 5]).unwrap();
        assert_eq!(reports.len(), 1);
        // eps 0: none; eps 5: (10,15) and (102,100); eps 50: adds (60,15).
        assert_eq!(reports[0].rows, vec![(0, 0), (5, 2), (50, 3)]);
    }

    #[test]
    fn sweep_does_not_pair_across_files() {
        let store = seeded_store(&[("a.c", "Gather", 10), ("b.c", "Scatter", 11)]);
        let pairs = vec![("Gather".to_string(), "Scatter".to_string())];
        let reports = sweep_epsilon(&store, &pairs, &[1000]).unwrap();
        assert_eq!(reports[0].rows, vec![(1000, 0)]);
    }

    #[test]
    fn sweep_rejects_empty_epsilons() {
        let store = seeded_store(&[("a.c", "Gather", 10)]);
        let pairs = vec![("Gather".to_string(), "Scatter".to_string())];
        assert!(matches!(
            sweep_epsilon(&store, &pairs, &[]),
            Err(PatternError::EmptyEpsilons)
        ));
    }

    #[test]
    fn fusion_ratio_counts_partnered_sites() {
        let store = seeded_store(&[
            ("a.c", "Gather", 10),
            ("a.c", "Scatter", 40),
            ("a.c", "Gather", 200),
        ]);
        let set = CollectiveSet::default_set();
        let (pct_gather, pct_scatter) =
            fusion_ratio(&store, &set, "Gather", "Scatter", 50).unwrap();
        // Gather at 10 is within 50 of Scatter at 40; Gather at 200 is not.
        assert_eq!(pct_gather, 50.0);
        assert_eq!(pct_scatter, 100.0);
    }

    #[test]
    fn fusion_ratio_rounds_half_up_to_one_decimal() {
        let store = seeded_store(&[
            ("a.c", "Gather", 10),
            ("a.c", "Scatter", 12),
            ("b.c", "Gather", 10),
            ("c.c", "Gather", 10),
        ]);
        let set = CollectiveSet::default_set();
        let (pct_gather, pct_scatter) = fusion_ratio(&store, &set, "Gather", "Scatter", 5).unwrap();
        // 1 of 3 Gather sites: 33.333...% rounds to 33.3.
        assert_eq!(pct_gather, 33.3);
        assert_eq!(pct_scatter, 100.0);

        let store = seeded_store(&[
            ("a.c", "Gather", 10),
            ("a.c", "Gather", 11),
            ("a.c", "Scatter", 12),
            ("b.c", "Gather", 10),
        ]);
        let (pct_gather, _) = fusion_ratio(&store, &set, "Gather", "Scatter", 5).unwrap();
        // 2 of 3: 66.666...% rounds to 66.7.
        assert_eq!(pct_gather, 66.7);
    }

    #[test]
    fn fusion_ratio_requires_nonzero_denominators() {
        let store = seeded_store(&[("a.c", "Gather", 10)]);
        let set = CollectiveSet::default_set();
        let err = fusion_ratio(&store, &set, "Gather", "Scatter", 50).unwrap_err();
        assert!(matches!(err, PatternError::ZeroDenominator(name) if name == "Scatter"));

        let err = fusion_ratio(&store, &set, "Gather", "Sendrecv", 50).unwrap_err();
        assert!(matches!(err, PatternError::Store(StoreError::UnknownCollective(_))));
    }

    #[test]
    fn homogeneity_counts_adjacent_pairs_without_epsilon() {
        let store = seeded_store(&[
            ("a.c", "Allreduce", 200),
            ("a.c", "Allreduce", 217),
            ("a.c", "Allgather", 227),
            ("a.c", "Allgather", 230),
        ]);
        let report = homogeneity_distribution(&store, "Allreduce", "Allgather").unwrap();
        assert_eq!(report.homogeneous, 2);
        assert_eq!(report.mixed, 1);
        let (h, m) = report.percentages().unwrap();
        assert_eq!(h, 66.7);
        assert_eq!(m, 33.3);

        // Distance never matters for adjacency.
        let store = seeded_store(&[("a.c", "Gather", 1), ("a.c", "Scatter", 5000)]);
        let report = homogeneity_distribution(&store, "Gather", "Scatter").unwrap();
        assert_eq!(report.mixed, 1);
        assert_eq!(report.homogeneous, 0);
    }

    #[test]
    fn homogeneity_ignores_other_collectives_and_single_site_files() {
        let store = seeded_store(&[
            ("a.c", "Gather", 10),
            ("a.c", "Barrier", 12),
            ("a.c", "Gather", 14),
            ("b.c", "Scatter", 1),
        ]);
        let report = homogeneity_distribution(&store, "Gather", "Scatter").unwrap();
        // a.c restricted to {Gather, Scatter} is Gather,Gather: one
        // homogeneous pair. b.c has a single site: no pairs.
        assert_eq!(report.homogeneous, 1);
        assert_eq!(report.mixed, 0);
        assert_eq!(report.percentages().unwrap(), (100.0, 0.0));
    }

    #[test]
    fn homogeneity_with_no_pairs_has_no_percentages() {
        let store = seeded_store(&[("a.c", "Gather", 10)]);
        let report = homogeneity_distribution(&store, "Gather", "Scatter").unwrap();
        assert_eq!(report.total(), 0);
        assert!(report.percentages().is_none());
    }

    #[test]
    fn percentage_complements_always_sum_to_one_hundred() {
        for homogeneous in 0..=37 {
            let report = HomogeneityReport {
                pair: ("A".to_string(), "B".to_string()),
                homogeneous,
                mixed: 37 - homogeneous,
            };
            let (h, m) = report.percentages().unwrap();
            let tenths = (h * 10.0).round() as i64 + (m * 10.0).round() as i64;
            assert_eq!(tenths, 1000);
        }
    }
}

//! Brute-force reference implementations of the pattern definitions.
//!
//! These trade all efficiency for obviousness: exhaustive double loops
//! and full window enumeration, written straight from the definitions.
//! Tests compare the real algorithms against them on random inputs.

use std::collections::BTreeSet;

/// Count (a_site, b_site) combinations within `eps` lines by checking
/// every pair of entries.
pub fn pair_count_exhaustive(sites: &[(String, u32)], a: &str, b: &str, eps: u32) -> u64 {
    let mut count = 0u64;
    for (name_i, line_i) in sites {
        if name_i != a {
            continue;
        }
        for (name_j, line_j) in sites {
            if name_j != b {
                continue;
            }
            let distance = line_i.abs_diff(*line_j);
            if distance <= eps {
                count += 1;
            }
        }
    }
    count
}

/// How many `a` sites have at least one `b` site within `eps`, and vice
/// versa.
pub fn fused_exhaustive(sites: &[(String, u32)], a: &str, b: &str, eps: u32) -> (u64, u64) {
    let one_way = |from: &str, to: &str| -> u64 {
        sites
            .iter()
            .filter(|(name, line)| {
                name == from
                    && sites
                        .iter()
                        .any(|(other, other_line)| other == to && line.abs_diff(*other_line) <= eps)
            })
            .count() as u64
    };
    (one_way(a, b), one_way(b, a))
}

/// Greedy maximal runs over the name-restricted site sequence, found by
/// enumerating every contiguous window whose span fits `eps` and then
/// walking the enumeration left to right, always taking the widest
/// window that starts at the cursor.
pub fn groups_exhaustive(
    sites: &[(String, u32)],
    names: &BTreeSet<String>,
    eps: Option<u32>,
    delta: usize,
) -> Vec<Vec<(String, u32)>> {
    let restricted: Vec<(String, u32)> = sites
        .iter()
        .filter(|(name, _)| names.contains(name))
        .cloned()
        .collect();
    let n = restricted.len();

    let mut valid = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i..n {
            let span = restricted[j].1 - restricted[i].1;
            valid[i][j] = match eps {
                None => true,
                Some(e) => span <= e,
            };
        }
    }

    let mut groups = Vec::new();
    let mut cursor = 0;
    while cursor < n {
        let mut widest = cursor;
        for j in cursor..n {
            if valid[cursor][j] {
                widest = j;
            }
        }
        if widest - cursor + 1 >= delta {
            groups.push(restricted[cursor..=widest].to_vec());
        }
        cursor = widest + 1;
    }
    groups
}

/// Adjacent-pair homogeneous/mixed tallies for one file restricted to
/// `{a, b}`.
pub fn homogeneity_exhaustive(sites: &[(String, u32)], a: &str, b: &str) -> (u64, u64) {
    let restricted: Vec<&(String, u32)> = sites
        .iter()
        .filter(|(name, _)| name == a || name == b)
        .collect();
    let mut homogeneous = 0;
    let mut mixed = 0;
    for pair in restricted.windows(2) {
        if pair[0].0 == pair[1].0 {
            homogeneous += 1;
        } else {
            mixed += 1;
        }
    }
    (homogeneous, mixed)
}

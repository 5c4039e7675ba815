use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Sums of nonempty subsets of `values` using at most `max_terms` terms,
/// ascending and deduplicated.
pub fn finite_sums(values: &[u64], max_terms: usize) -> Vec<u64> {
    // fewest terms needed to reach each sum
    let mut fewest: HashMap<u64, usize> = HashMap::new();
    if max_terms == 0 {
        return Vec::new();
    }
    for &v in values {
        let mut updates: Vec<(u64, usize)> = fewest
            .iter()
            .filter(|&(_, &t)| t < max_terms)
            .map(|(&s, &t)| (s + v, t + 1))
            .collect();
        updates.push((v, 1));
        for (s, t) in updates {
            fewest.entry(s).and_modify(|old| *old = (*old).min(t)).or_insert(t);
        }
    }
    let mut out: Vec<u64> = fewest.into_keys().collect();
    out.sort_unstable();
    out
}

/// Unions of nonempty block-increasing subsequences. Inputs are put in
/// block order first; the output lists subsequence `I` at position
/// `Σ_{i∈I} 2^i - 1`.
pub fn finite_unions(sets: &[BTreeSet<usize>]) -> Result<Vec<BTreeSet<usize>>> {
    if sets.iter().any(BTreeSet::is_empty) {
        return Err(Error::EmptyElement);
    }
    let mut ordered: Vec<&BTreeSet<usize>> = sets.iter().collect();
    ordered.sort_by_key(|s| s.first().copied());
    for pair in ordered.windows(2) {
        if pair[0].last() >= pair[1].first() {
            return Err(Error::NotBlockOrdered);
        }
    }
    if ordered.len() >= 64 {
        return Err(Error::InvalidArgument(format!("{} sets give too many unions", ordered.len())));
    }
    let out = (1u64..1 << ordered.len())
        .map(|mask| {
            ordered
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, s)| s.iter().copied())
                .collect()
        })
        .collect();
    Ok(out)
}

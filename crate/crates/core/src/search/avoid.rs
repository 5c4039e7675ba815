use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coloring::{domain, ColoringSpec};
use super::subspace::search_subspace;
use crate::error::{Error, Result};
use crate::fin::FinElement;
use crate::span::BlockSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvoidanceMode {
    /// Backtracking over all colorings; refused when `c^|domain|` exceeds `budget`.
    Exhaustive { budget: u128 },
    /// Up to `tries` uniformly random colorings drawn from a ChaCha8 stream.
    Randomized { seed: u64, tries: u64 },
}

/// A `c`-coloring of the rank-`k` elements on `[0, n)` with no monochromatic
/// depth-`d` subspace, confirmed by a full [`search_subspace`] run.
///
/// In exhaustive mode `None` means every coloring has such a subspace.
pub fn find_avoidance_coloring(k: u32, n: usize, d: usize, c: u32, mode: AvoidanceMode) -> Result<Option<ColoringSpec>> {
    if k == 0 || d == 0 || c == 0 {
        return Err(Error::InvalidArgument("k, d and c must be at least 1".into()));
    }
    let elems = domain(k, n);
    let found = match mode {
        AvoidanceMode::Exhaustive { budget } => {
            let required = u128::from(c).checked_pow(elems.len() as u32).unwrap_or(u128::MAX);
            if required > budget {
                return Err(Error::BudgetExceeded { required, budget });
            }
            exhaustive(&elems, k, d, c)?
        }
        AvoidanceMode::Randomized { seed, tries } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hit = None;
            for _ in 0..tries {
                let colors: Vec<u32> = elems.iter().map(|_| rng.gen_range(0..c)).collect();
                let spec = ColoringSpec::from_table(k, n, c, elems.iter().cloned().zip(colors.iter().copied()))?;
                if search_subspace(&spec, d, true)?.is_none() {
                    hit = Some(colors);
                    break;
                }
            }
            hit
        }
    };
    let Some(colors) = found else {
        return Ok(None);
    };
    let spec = ColoringSpec::from_table(k, n, c, elems.into_iter().zip(colors))?;
    assert!(
        search_subspace(&spec, d, true)?.is_none(),
        "avoidance coloring admits a monochromatic subspace"
    );
    Ok(Some(spec))
}

/// Every depth-`d` subspace as span index lists, grouped by the largest
/// domain index in the span.
fn subspaces_by_completion(elems: &[FinElement], k: u32, d: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let index: HashMap<&FinElement, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut groups = vec![Vec::new(); elems.len()];
    let mut stack: Vec<usize> = Vec::new();
    fn walk(
        elems: &[FinElement],
        index: &HashMap<&FinElement, usize>,
        k: u32,
        d: usize,
        stack: &mut Vec<usize>,
        groups: &mut [Vec<Vec<usize>>],
    ) -> Result<()> {
        if stack.len() == d {
            let blocks = BlockSequence::new(stack.iter().map(|&i| elems[i].clone()).collect(), k)?;
            let members: Vec<usize> = blocks.span_enumerate(d)?.iter().map(|f| index[f]).collect();
            let last = *members.iter().max().expect("spans are nonempty");
            groups[last].push(members);
            return Ok(());
        }
        let floor = stack.last().map(|&i| elems[i].mu().expect("nonempty"));
        for i in stack.last().map_or(0, |&i| i + 1)..elems.len() {
            if floor.is_some_and(|f| elems[i].lambda().expect("nonempty") <= f) {
                continue;
            }
            stack.push(i);
            walk(elems, index, k, d, stack, groups)?;
            stack.pop();
        }
        Ok(())
    }
    walk(elems, &index, k, d, &mut stack, &mut groups)?;
    Ok(groups)
}

/// Backtracking in domain order. Colors are introduced in order of first
/// use, so each coloring is visited once up to renaming.
fn exhaustive(elems: &[FinElement], k: u32, d: usize, c: u32) -> Result<Option<Vec<u32>>> {
    let groups = subspaces_by_completion(elems, k, d)?;
    let mut colors = vec![0u32; elems.len()];

    fn assign(t: usize, used: u32, c: u32, colors: &mut [u32], groups: &[Vec<Vec<usize>>]) -> bool {
        if t == colors.len() {
            return true;
        }
        for color in 0..c.min(used + 1) {
            colors[t] = color;
            let blocked = groups[t].iter().any(|members| members.iter().all(|&m| colors[m] == color));
            if !blocked && assign(t + 1, used.max(color + 1), c, colors, groups) {
                return true;
            }
        }
        false
    }

    Ok(assign(0, 0, c, &mut colors, &groups).then_some(colors))
}

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::coloring::{domain, Coloring};
use crate::error::{Error, Result};
use crate::fin::FinElement;
use crate::span::BlockSequence;

/// Partial sums `Σ T^{k-c_j}(b_j)` over the blocks chosen so far, paired
/// with the largest coefficient used. Contains every coefficient vector,
/// including ones that do not reach `k`.
type Partials = Vec<(FinElement, u32)>;

struct Searcher<'a, C: ?Sized> {
    coloring: &'a C,
    candidates: &'a [FinElement],
    k: u32,
    d: usize,
    prune: bool,
}

impl<C: Coloring + ?Sized> Searcher<'_, C> {
    /// Extends `partials` by `block`; with pruning on, fails fast when a new
    /// span element disagrees with `target` (set from the first one seen).
    fn extend(&self, partials: &Partials, block: &FinElement, target: &mut Option<u32>) -> Result<Option<Partials>> {
        let mut next = Vec::with_capacity(partials.len() * (self.k as usize + 1));
        let images: Vec<FinElement> = (1..=self.k).map(|c| block.tetris_n(self.k - c)).collect();
        for (p, top) in partials {
            next.push((p.clone(), *top));
            for (c, image) in (1..=self.k).zip(&images) {
                let q = p.try_sum(image)?;
                let top = (*top).max(c);
                if self.prune && top == self.k {
                    let color = self.coloring.color(&q)?;
                    match target {
                        Some(t) if *t != color => return Ok(None),
                        Some(_) => {}
                        None => *target = Some(color),
                    }
                }
                next.push((q, top));
            }
        }
        Ok(Some(next))
    }

    fn dfs(&self, chosen: &mut Vec<usize>, partials: &Partials, target: Option<u32>) -> Result<bool> {
        if chosen.len() == self.d {
            if self.prune {
                return Ok(true);
            }
            return self.full_span_monochromatic(partials);
        }
        let last = *chosen.last().expect("dfs starts with one block");
        let floor = self.candidates[last].mu().expect("blocks are nonempty");
        for idx in last + 1..self.candidates.len() {
            let block = &self.candidates[idx];
            if block.lambda().expect("blocks are nonempty") <= floor {
                continue;
            }
            let mut t = target;
            let Some(next) = self.extend(partials, block, &mut t)? else {
                continue;
            };
            chosen.push(idx);
            if self.dfs(chosen, &next, t)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    fn full_span_monochromatic(&self, partials: &Partials) -> Result<bool> {
        let mut seen = None;
        for (q, top) in partials {
            if *top != self.k {
                continue;
            }
            let c = self.coloring.color(q)?;
            if *seen.get_or_insert(c) != c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn search_from(&self, first: usize) -> Result<Option<Vec<usize>>> {
        let root: Partials = vec![(FinElement::empty(0), 0)];
        let mut target = None;
        let Some(partials) = self.extend(&root, &self.candidates[first], &mut target)? else {
            return Ok(None);
        };
        let mut chosen = vec![first];
        Ok(self.dfs(&mut chosen, &partials, target)?.then_some(chosen))
    }
}

/// Lexicographically first sequence of `d` block-increasing domain elements
/// (in [`domain`] order) whose depth-`d` span is monochromatic.
///
/// With `prune` on, a prefix is dropped as soon as its own span uses two
/// colors; with it off, only complete sequences are checked. First-level
/// branches run in parallel without affecting which witness is returned.
pub fn search_subspace<C: Coloring + ?Sized>(coloring: &C, d: usize, prune: bool) -> Result<Option<BlockSequence>> {
    if d == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let candidates = domain(coloring.k(), coloring.n());
    let searcher = Searcher { coloring, candidates: &candidates, k: coloring.k(), d, prune };
    let hit = (0..candidates.len()).into_par_iter().find_map_first(|first| match searcher.search_from(first) {
        Ok(Some(found)) => Some(Ok(found)),
        Ok(None) => None,
        Err(err) => Some(Err(err)),
    });
    match hit {
        None => Ok(None),
        Some(Err(err)) => Err(err),
        Some(Ok(indices)) => {
            let blocks = indices.into_iter().map(|i| candidates[i].clone()).collect();
            Ok(Some(BlockSequence::new(blocks, coloring.k())?))
        }
    }
}

/// Colors the whole span of `blocks` from scratch. Returns the common color
/// if it is monochromatic.
pub fn verify_subspace<C: Coloring + ?Sized>(coloring: &C, blocks: &BlockSequence) -> Result<Option<u32>> {
    let span = blocks.span_enumerate(blocks.len())?;
    let first = coloring.color(&span[0])?;
    for f in &span[1..] {
        if coloring.color(f)? != first {
            return Ok(None);
        }
    }
    Ok(Some(first))
}

pub fn set_to_element(set: &BTreeSet<usize>) -> Result<FinElement> {
    FinElement::new(1, set.iter().map(|&p| (p, 1)))
}

pub fn element_to_set(f: &FinElement) -> BTreeSet<usize> {
    f.support().into_iter().collect()
}

/// [`search_subspace`] on a coloring of nonempty subsets of `[0, n)`
/// (rank 1), answering with pairwise disjoint block-ordered sets.
pub fn hindman_fu_search<C: Coloring + ?Sized>(coloring: &C, d: usize, prune: bool) -> Result<Option<Vec<BTreeSet<usize>>>> {
    if coloring.k() != 1 {
        return Err(Error::BadRank { expected: 1, found: coloring.k() });
    }
    Ok(search_subspace(coloring, d, prune)?.map(|b| b.blocks().iter().map(element_to_set).collect()))
}

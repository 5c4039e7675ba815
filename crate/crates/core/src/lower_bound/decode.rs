//! Recovering the level sets from a homogeneous block sequence.
//!
//! To decide `x` at level `i`, find `f < g` in `⟨B⟩` whose images both
//! contain `i` with `x < λ(f)`; then `x` is in the level-`i` set iff it is in
//! the stage-`λ_i(g)` approximation over the (already decoded) level `i-1`.
//! Only [`StagedApprox`] is consulted.

use crate::error::{Error, Result};
use crate::fin::FinElement;
use crate::oracle::StagedApprox;
use crate::span::BlockSequence;

/// First pair `(f, g)` in depth-then-lexicographic order with `f < g`,
/// `x < λ(f)` and value `level` in both images.
pub fn find_decoding_pair(blocks: &BlockSequence, level: usize, x: usize) -> Option<(FinElement, FinElement)> {
    let value = u32::try_from(level).ok()?;
    // blocks ending at or before x cannot contribute to f
    let first = blocks.blocks().partition_point(|b| b.mu().is_some_and(|mu| mu <= x));
    if first >= blocks.len() {
        return None;
    }
    let tail = BlockSequence::new(blocks.blocks()[first..].to_vec(), blocks.k()).ok()?;
    for (coeffs, f) in tail.span_by_depth() {
        let depth = coeffs.len();
        if depth >= tail.len() {
            break;
        }
        if !f.contains_value(value) || f.lambda().is_none_or(|lo| lo <= x) {
            continue;
        }
        let rest = BlockSequence::new(tail.blocks()[depth..].to_vec(), tail.k()).ok()?;
        let g = rest.span_by_depth().map(|(_, g)| g).find(|g| g.contains_value(value));
        if let Some(g) = g {
            debug_assert!(f.block_less(&g).unwrap_or(false));
            return Some((f, g));
        }
    }
    None
}

/// Decides membership of `x` in the level-`level` set given the decoded
/// level below on `[0, x)`.
pub fn decode_membership<O: StagedApprox + ?Sized>(
    blocks: &BlockSequence,
    oracle: &O,
    k: usize,
    level: usize,
    x: usize,
    decoded_lower: &[bool],
) -> Result<bool> {
    if k == 0 || k > oracle.levels() || level == 0 || level > k {
        return Err(Error::BadLevel { level, min: 1, max: k.min(oracle.levels()) });
    }
    if blocks.k() as usize != k + 1 {
        return Err(Error::BadRank { expected: k as u32 + 1, found: blocks.k() });
    }
    if x >= oracle.x_max() {
        return Err(Error::DomainExceeded { x, x_max: oracle.x_max() });
    }
    let (_, g) = find_decoding_pair(blocks, level, x).ok_or(Error::SearchExhausted { level, x, depth: blocks.len() })?;
    let stage = g.lambda_at(level as u32).expect("g carries the level value");
    oracle.step_approx(level, stage, decoded_lower, x)
}

/// Decodes levels `1..=k` on `[0, x_bound)` bottom-up, starting from the
/// empty level 0. `result[i - 1]` is level `i`.
pub fn decode_levels<O: StagedApprox + ?Sized>(
    blocks: &BlockSequence,
    oracle: &O,
    k: usize,
    x_bound: usize,
) -> Result<Vec<Vec<bool>>> {
    let mut lower = vec![false; x_bound];
    let mut out = Vec::with_capacity(k);
    for level in 1..=k {
        let mut current = Vec::with_capacity(x_bound);
        for x in 0..x_bound {
            current.push(decode_membership(blocks, oracle, k, level, x, &lower[..x])?);
        }
        out.push(current.clone());
        lower = current;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower_bound::construct::build_stable_block_sequence;
    use crate::oracle::{GroundTruth, ScriptedFamily};

    #[test]
    fn pair_search_order() {
        let b = BlockSequence::parse("0:1,1:2,2:3;5:1,6:2,7:3;9:1,10:2,11:3", Some(3)).unwrap();
        let (f, g) = find_decoding_pair(&b, 2, 0).unwrap();
        assert_eq!(f.to_string(), "5:1,6:2,7:3");
        assert_eq!(g.to_string(), "9:1,10:2,11:3");
        assert_eq!(find_decoding_pair(&b, 2, 4).unwrap().0.to_string(), "5:1,6:2,7:3");
        // past λ(b_1) the only f using b_1 also uses b_2, leaving nothing for g
        assert!(find_decoding_pair(&b, 2, 5).is_none());
        assert!(find_decoding_pair(&b, 2, 9).is_none());
    }

    #[test]
    fn singleton_blocks_need_two_blocks_per_side() {
        let b = BlockSequence::parse("0:2;1:2;2:2;3:2;4:2", Some(2)).unwrap();
        let (f, g) = find_decoding_pair(&b, 1, 0).unwrap();
        assert_eq!(f.to_string(), "1:1,2:2");
        assert_eq!(g.to_string(), "3:1,4:2");
        // three blocks past x: g would have to be a lone T-image, which is not in ⟨B⟩
        let four = BlockSequence::parse("0:2;1:2;2:2;3:2", Some(2)).unwrap();
        assert!(find_decoding_pair(&four, 1, 0).is_none());
    }

    #[test]
    fn first_level_matches_truth() {
        let family = ScriptedFamily::generate(3, 1, 48, 0..=12).unwrap();
        let b = build_stable_block_sequence(&family, 1, 3, 12).unwrap();
        let decoded = decode_levels(&b, &family, 1, 12).unwrap();
        assert_eq!(decoded[0], family.limit_set(1, 12).unwrap());
    }

    #[test]
    fn exhausted_search() {
        let family = ScriptedFamily::uniform(1, 16, 0, 0);
        let b = build_stable_block_sequence(&family, 1, 3, 1).unwrap();
        assert_eq!(
            decode_membership(&b, &family, 1, 1, 4, &[false; 4]),
            Err(Error::SearchExhausted { level: 1, x: 4, depth: 3 })
        );
    }
}

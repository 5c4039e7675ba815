//! Block sequences spaced past the limit-lemma moduli, companion elements and
//! exhaustive homogeneity checks.

use rayon::prelude::*;
use serde::Serialize;

use super::gaps::{color, short_gap_count, very_short_gap_count, VsgVariant};
use crate::error::{Error, Result};
use crate::fin::FinElement;
use crate::oracle::{GroundTruth, StagedApprox};
use crate::span::BlockSequence;

/// `{start: 1, start+1: 2, …, start+k: k+1}`: a rank-`k+1` block that carries
/// every value once, so each span element sees every level.
pub fn staircase_block(start: usize, k: usize) -> FinElement {
    let entries = (0..=k).map(|j| (start + j, j as u32 + 1)).collect();
    FinElement::from_sorted_unchecked(k as u32 + 1, entries)
}

/// Largest modulus over levels `1..=k` for `[0, bound)`, with `bound`
/// clipped to the domain.
fn joint_modulus<O: GroundTruth + ?Sized>(oracle: &O, k: usize, bound: usize) -> Result<usize> {
    let bound = bound.min(oracle.x_max());
    (1..=k).map(|level| oracle.modulus(level, bound)).try_fold(0, |acc, m| Ok(acc.max(m?)))
}

fn check_k<O: StagedApprox + ?Sized>(oracle: &O, k: usize) -> Result<()> {
    if k == 0 || k > oracle.levels() {
        return Err(Error::BadLevel { level: k, min: 1, max: oracle.levels() });
    }
    Ok(())
}

/// Length-`d` sequence of staircase blocks in `FIN_{k+1}` starting at 0.
/// Each block begins at least `spacing` after the previous block ends and no
/// earlier than the joint modulus for everything up to that end, so every
/// consecutive same-value pair in the span is past stabilization.
pub fn build_stable_block_sequence<O: GroundTruth + ?Sized>(
    oracle: &O,
    k: usize,
    d: usize,
    spacing: usize,
) -> Result<BlockSequence> {
    build_stable_block_sequence_from(oracle, k, d, spacing, 0)
}

pub fn build_stable_block_sequence_from<O: GroundTruth + ?Sized>(
    oracle: &O,
    k: usize,
    d: usize,
    spacing: usize,
    start: usize,
) -> Result<BlockSequence> {
    check_k(oracle, k)?;
    if d == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let spacing = spacing.max(1);
    let mut starts = Vec::with_capacity(d);
    let mut next = start;
    for _ in 0..d {
        starts.push(next);
        let end = next + k;
        next = (end + spacing).max(joint_modulus(oracle, k, end + 1)?);
    }
    let last_end = starts[d - 1] + k;
    if last_end >= oracle.x_max() {
        return Err(Error::InsufficientDomain { required_x_max: last_end + 1, x_max: oracle.x_max() });
    }
    let blocks = starts.into_iter().map(|s| staircase_block(s, k)).collect();
    BlockSequence::new(blocks, k as u32 + 1)
}

/// Chooses `g_0 < g_1 < … < g_k` among `fresh` so that `g_0` starts past the
/// joint modulus for `[0, μ(f)]` and each `g_{t+1}` starts past the joint
/// modulus for `[0, μ(g_t)]`, then returns `g = Σ_t T^t(g_t)`.
///
/// With this spacing every short gap of `f` is a very short gap of `f + g`,
/// no new very short gap appears between `f` and `g`, and
/// `VSG_i(f + g) = SG_i(f) + VSG_i(g)` for every level.
pub fn build_companion<O: GroundTruth + ?Sized>(
    f: &FinElement,
    oracle: &O,
    k: usize,
    fresh: &BlockSequence,
) -> Result<FinElement> {
    check_k(oracle, k)?;
    if fresh.k() as usize != k + 1 {
        return Err(Error::BadRank { expected: k as u32 + 1, found: fresh.k() });
    }
    if f.rank() as usize > k + 1 {
        return Err(Error::BadRank { expected: k as u32 + 1, found: f.rank() });
    }
    for x in f.mu().into_iter().chain(fresh.blocks().last().and_then(FinElement::mu)) {
        if x >= oracle.x_max() {
            return Err(Error::DomainExceeded { x, x_max: oracle.x_max() });
        }
    }
    let mut after = f.mu();
    let mut threshold = match after {
        Some(mu) => joint_modulus(oracle, k, mu + 1)?,
        None => 0,
    };
    let mut candidates = fresh.blocks().iter();
    let mut g = FinElement::empty(k as u32 + 1);
    for part in 0..=k {
        let chosen = candidates
            .by_ref()
            .find(|b| {
                let lo = b.lambda().expect("blocks are nonempty");
                after.is_none_or(|mu| lo > mu) && lo >= threshold
            })
            .ok_or(Error::InsufficientBlocks { part })?;
        g = g.try_sum(&chosen.tetris_n(part as u32))?;
        let mu = chosen.mu().expect("blocks are nonempty");
        after = Some(mu);
        threshold = joint_modulus(oracle, k, mu + 1)?;
    }
    let g = g.with_ambient(k as u32 + 1)?;
    debug_assert!(claim2_rows(f, &g, oracle, k).map(|rows| rows.iter().all(Claim2Row::holds)).unwrap_or(false));
    Ok(g)
}

/// One level of the identity `VSG_i(f + g) = SG_i(f) + VSG_i(g)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim2Row {
    pub level: usize,
    pub vsg_sum: usize,
    pub sg_f: usize,
    pub vsg_g: usize,
}

impl Claim2Row {
    pub fn holds(&self) -> bool {
        self.vsg_sum == self.sg_f + self.vsg_g
    }
}

pub fn claim2_rows<O: GroundTruth + ?Sized>(
    f: &FinElement,
    g: &FinElement,
    oracle: &O,
    k: usize,
) -> Result<Vec<Claim2Row>> {
    let sum = f.try_sum(g)?;
    (1..=k)
        .map(|level| {
            Ok(Claim2Row {
                level,
                vsg_sum: very_short_gap_count(&sum, oracle, level, VsgVariant::Outer)?,
                sg_f: short_gap_count(f, oracle, level)?,
                vsg_g: very_short_gap_count(g, oracle, level, VsgVariant::Outer)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoredElement {
    pub element: String,
    pub color: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneityReport {
    pub monochromatic: bool,
    /// The common color when monochromatic.
    pub color: Option<u32>,
    pub sample_size: usize,
    pub sample: Vec<ColoredElement>,
}

/// Colors every element of the depth-`d` span of `blocks`.
pub fn verify_homogeneous<O: StagedApprox + Sync + ?Sized>(
    blocks: &BlockSequence,
    oracle: &O,
    k: usize,
    d: usize,
    variant: VsgVariant,
) -> Result<HomogeneityReport> {
    if blocks.k() as usize != k + 1 {
        return Err(Error::BadRank { expected: k as u32 + 1, found: blocks.k() });
    }
    let span = blocks.span_enumerate(d)?;
    let colors = span.par_iter().map(|x| color(x, oracle, k, variant)).collect::<Result<Vec<_>>>()?;
    let first = colors.first().copied();
    let monochromatic = colors.iter().all(|&c| Some(c) == first);
    let sample = span
        .iter()
        .zip(&colors)
        .map(|(x, &color)| ColoredElement { element: x.to_string(), color })
        .collect();
    Ok(HomogeneityReport {
        monochromatic,
        color: if monochromatic { first } else { None },
        sample_size: colors.len(),
        sample,
    })
}

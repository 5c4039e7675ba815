//! Short gaps, very short gaps and the parity coloring built from them.
//!
//! For an element `f` and a level `i`, the consecutive positions where `f`
//! takes the value `i` form pairs `(n_j, n_{j+1})`. A pair is a *short gap*
//! when the true level-`i` set and the stage-`n_{j+1}` approximation over the
//! true level `i-1` disagree somewhere on `[0, n_j]`; this needs the limits.
//! A pair is a *very short gap* when two nested approximations, both read off
//! `f`'s own `μ_j` statistics, disagree on `[0, n_j]`; this needs stages only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fin::FinElement;
use crate::oracle::{approx_set, nested_set, GroundTruth, StagedApprox};

/// Where the varying stage `n_{j+1}` goes in the right-hand nested tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VsgVariant {
    /// Replace the outermost stage: `(n_{j+1}, μ_{i-1}, …, μ_1)`.
    #[default]
    Outer,
    /// Replace the innermost stage: `(μ_i, …, μ_2, n_{j+1})`.
    Literal,
}

impl std::str::FromStr for VsgVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outer" => Ok(Self::Outer),
            "literal" => Ok(Self::Literal),
            other => Err(Error::InvalidArgument(format!("unknown vsg variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub level: usize,
    pub gaps: Vec<(usize, usize)>,
    pub short: Vec<bool>,
    pub very_short: Vec<bool>,
    pub sg_count: usize,
    pub vsg_count: usize,
}

fn check_inputs<O: StagedApprox + ?Sized>(f: &FinElement, oracle: &O, level: usize) -> Result<()> {
    if level == 0 || level > oracle.levels() {
        return Err(Error::BadLevel { level, min: 1, max: oracle.levels() });
    }
    if let Some(mu) = f.mu() {
        if mu >= oracle.x_max() {
            return Err(Error::DomainExceeded { x: mu, x_max: oracle.x_max() });
        }
    }
    Ok(())
}

fn value_of(level: usize) -> u32 {
    u32::try_from(level).expect("level fits in u32")
}

/// Consecutive pairs of positions where `f` equals `level`.
pub fn gap_pairs(f: &FinElement, level: usize) -> Vec<(usize, usize)> {
    f.positions_of(value_of(level)).windows(2).map(|w| (w[0], w[1])).collect()
}

/// `(μ_i(f), μ_{i-1}(f), …, μ_1(f))` with undefined entries read as 0.
pub fn mu_tuple(f: &FinElement, level: usize) -> Vec<usize> {
    (1..=level).rev().map(|j| f.mu_at(value_of(j)).unwrap_or(0)).collect()
}

fn short_flags<O: GroundTruth + ?Sized>(f: &FinElement, oracle: &O, level: usize) -> Result<Vec<bool>> {
    let pairs = gap_pairs(f, level);
    let Some(&(last, _)) = pairs.last() else {
        return Ok(Vec::new());
    };
    let truth = oracle.limit_set(level, last + 1)?;
    let lower = oracle.limit_set(level - 1, last + 1)?;
    pairs
        .iter()
        .map(|&(a, b)| Ok(approx_set(oracle, level, b, &lower[..=a])? != truth[..=a]))
        .collect()
}

fn very_short_flags<O: StagedApprox + ?Sized>(
    f: &FinElement,
    oracle: &O,
    level: usize,
    variant: VsgVariant,
) -> Result<Vec<bool>> {
    let pairs = gap_pairs(f, level);
    let Some(&(last, _)) = pairs.last() else {
        return Ok(Vec::new());
    };
    let stages = mu_tuple(f, level);
    let left = nested_set(oracle, level, &stages, last + 1)?;
    match variant {
        VsgVariant::Outer => {
            let inner = nested_set(oracle, level - 1, &stages[1..], last + 1)?;
            pairs
                .iter()
                .map(|&(a, b)| Ok(approx_set(oracle, level, b, &inner[..=a])? != left[..=a]))
                .collect()
        }
        VsgVariant::Literal => pairs
            .iter()
            .map(|&(a, b)| {
                let mut tuple = stages.clone();
                *tuple.last_mut().expect("level >= 1") = b;
                Ok(nested_set(oracle, level, &tuple, a + 1)? != left[..=a])
            })
            .collect(),
    }
}

/// `SG_i(f)`: needs the true level sets.
pub fn short_gap_count<O: GroundTruth + ?Sized>(f: &FinElement, oracle: &O, level: usize) -> Result<usize> {
    check_inputs(f, oracle, level)?;
    Ok(short_flags(f, oracle, level)?.into_iter().filter(|&b| b).count())
}

/// `VSG_i(f)`: computable from staged approximations alone.
pub fn very_short_gap_count<O: StagedApprox + ?Sized>(
    f: &FinElement,
    oracle: &O,
    level: usize,
    variant: VsgVariant,
) -> Result<usize> {
    check_inputs(f, oracle, level)?;
    Ok(very_short_flags(f, oracle, level, variant)?.into_iter().filter(|&b| b).count())
}

pub fn gap_report<O: GroundTruth + ?Sized>(
    f: &FinElement,
    oracle: &O,
    level: usize,
    variant: VsgVariant,
) -> Result<GapReport> {
    check_inputs(f, oracle, level)?;
    let short = short_flags(f, oracle, level)?;
    let very_short = very_short_flags(f, oracle, level, variant)?;
    Ok(GapReport {
        level,
        gaps: gap_pairs(f, level),
        sg_count: short.iter().filter(|&&b| b).count(),
        vsg_count: very_short.iter().filter(|&&b| b).count(),
        short,
        very_short,
    })
}

/// `c(f) = Σ_{i=1}^{k} 2^{i-1} · (VSG_i(f) mod 2)` on rank-`k+1` elements.
pub fn color<O: StagedApprox + ?Sized>(f: &FinElement, oracle: &O, k: usize, variant: VsgVariant) -> Result<u32> {
    if k > oracle.levels() {
        return Err(Error::BadLevel { level: k, min: 0, max: oracle.levels() });
    }
    if f.rank() as usize != k + 1 {
        return Err(Error::BadRank { expected: value_of(k + 1), found: f.rank() });
    }
    let mut out = 0;
    for level in 1..=k {
        if very_short_gap_count(f, oracle, level, variant)? % 2 == 1 {
            out |= 1 << (level - 1);
        }
    }
    Ok(out)
}

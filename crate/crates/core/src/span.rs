//! Block sequences and the combinatorial spaces they generate.
//!
//! A finite block sequence `B = (b_0, …, b_{d-1})` of rank-`k` blocks spans
//! `⟨B⟩ = { Θ_B(f) }` where `Θ_B(f) = Σ_n T^{k-f(n)}(b_n)` and `f` ranges over
//! coefficient vectors in `{0..k}^d` attaining `k`. Coefficient vectors are
//! enumerated lexicographically with coordinate 0 most significant.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fin::FinElement;

const PAR_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSequence {
    blocks: Vec<FinElement>,
    k: u32,
}

impl BlockSequence {
    /// Checks that every block has rank `k` and that blocks are strictly
    /// block-increasing. Blocks are re-homed to ambient bound `k`.
    pub fn new(blocks: Vec<FinElement>, k: u32) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptySequence);
        }
        for (index, block) in blocks.iter().enumerate() {
            if block.rank() != k {
                return Err(Error::RankMismatch { index, expected: k, found: block.rank() });
            }
            if index > 0 && !blocks[index - 1].block_less(block)? {
                return Err(Error::NotIncreasing { index });
            }
        }
        let blocks = blocks.into_iter().map(|b| b.with_ambient(k)).collect::<Result<_>>()?;
        Ok(Self { blocks, k })
    }

    /// Parses `"0:2;3:1,4:2"`. Without an explicit `k` the first block's rank is used.
    pub fn parse(text: &str, k: Option<u32>) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut offset = 0;
        for piece in text.split(';') {
            let block: FinElement = piece.parse().map_err(|err| match err {
                Error::Parse { offset: inner, message } => Error::Parse { offset: offset + inner, message },
                other => other,
            })?;
            blocks.push(block);
            offset += piece.len() + 1;
        }
        let k = k.unwrap_or_else(|| blocks.first().map_or(0, FinElement::rank));
        Self::new(blocks, k)
    }

    pub fn blocks(&self) -> &[FinElement] {
        &self.blocks
    }

    pub fn block(&self, n: usize) -> Option<&FinElement> {
        self.blocks.get(n)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The first `d` blocks.
    pub fn prefix(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.len() {
            return Err(Error::DepthTooLarge { depth: d, len: self.len() });
        }
        Ok(Self { blocks: self.blocks[..d].to_vec(), k: self.k })
    }

    /// `Θ_B(f)`. The result keeps `f`'s ambient bound, so `Θ_B ∘ T = T ∘ Θ_B`.
    pub fn theta(&self, f: &FinElement) -> Result<FinElement> {
        if f.ambient_k() > self.k {
            return Err(Error::BadRank { expected: self.k, found: f.ambient_k() });
        }
        let mut entries = Vec::new();
        for &(n, value) in f.entries() {
            let block = self.blocks.get(n).ok_or(Error::IndexOutOfRange { index: n, len: self.len() })?;
            entries.extend_from_slice(block.tetris_n(self.k - value).entries());
        }
        Ok(FinElement::from_sorted_unchecked(f.ambient_k(), entries))
    }

    /// `Θ_B` on a dense coefficient vector; zero coordinates are skipped.
    pub fn theta_dense(&self, coeffs: &[u32]) -> FinElement {
        debug_assert!(coeffs.len() <= self.len());
        let mut entries = Vec::new();
        for (n, &value) in coeffs.iter().enumerate() {
            if value > 0 {
                entries.extend_from_slice(self.blocks[n].tetris_n(self.k - value).entries());
            }
        }
        let rank = coeffs.iter().copied().max().unwrap_or(0);
        FinElement::from_sorted_unchecked(rank, entries)
    }

    /// Every element of the depth-`d` span, in lexicographic coefficient order.
    /// Contains exactly `(k+1)^d - k^d` elements.
    pub fn span_enumerate(&self, d: usize) -> Result<Vec<FinElement>> {
        if d > self.len() {
            return Err(Error::DepthTooLarge { depth: d, len: self.len() });
        }
        let vectors = coefficient_vectors(self.k, d);
        let out: Vec<FinElement> = if vectors.len() >= PAR_THRESHOLD {
            vectors.par_iter().map(|c| self.theta_dense(c)).collect()
        } else {
            vectors.iter().map(|c| self.theta_dense(c)).collect()
        };
        debug_assert_eq!(out.iter().collect::<HashSet<_>>().len(), out.len(), "theta is injective");
        Ok(out)
    }

    /// `⋃_{i=0}^{k} T^i ⟨B⟩` at depth `d`, empty element excluded. Ordered by
    /// `i`, then by the span order of the preimage; repeats are dropped.
    pub fn extended_span_enumerate(&self, d: usize) -> Result<Vec<FinElement>> {
        let span = self.span_enumerate(d)?;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for i in 0..=self.k {
            for x in &span {
                let image = x.tetris_n(i);
                if !image.is_empty() && seen.insert(image.clone()) {
                    out.push(image);
                }
            }
        }
        Ok(out)
    }

    /// Inverts `Θ_B`: the coefficient element `f` with `Θ_B(f) = x`, if any.
    pub fn span_contains(&self, x: &FinElement) -> Option<FinElement> {
        if x.ambient_k() > self.k {
            return None;
        }
        let entries = x.entries();
        let mut coeffs = Vec::new();
        let mut i = 0;
        while i < entries.len() {
            let pos = entries[i].0;
            let n = self.blocks.partition_point(|b| b.lambda().is_some_and(|lo| lo <= pos)).checked_sub(1)?;
            let block = &self.blocks[n];
            let hi = block.mu()?;
            if pos > hi {
                return None;
            }
            let end = i + entries[i..].partition_point(|&(p, _)| p <= hi);
            let piece = &entries[i..end];
            let value = piece.iter().map(|&(_, v)| v).max()?;
            if block.tetris_n(self.k - value).entries() != piece {
                return None;
            }
            coeffs.push((n, value));
            i = end;
        }
        FinElement::new(x.ambient_k(), coeffs).ok()
    }

    /// Walks `⟨B⟩` over the whole sequence ordered by depth (index of the last
    /// used block), then lexicographically.
    pub fn span_by_depth(&self) -> SpanByDepth<'_> {
        SpanByDepth { seq: self, depth: 0, coeffs: Vec::new() }
    }
}

/// Iterator behind [`BlockSequence::span_by_depth`]; yields `(coeffs, element)`.
pub struct SpanByDepth<'a> {
    seq: &'a BlockSequence,
    depth: usize,
    coeffs: Vec<u32>,
}

impl Iterator for SpanByDepth<'_> {
    type Item = (Vec<u32>, FinElement);

    fn next(&mut self) -> Option<Self::Item> {
        let k = self.seq.k;
        if k == 0 {
            return None;
        }
        loop {
            if self.depth >= self.seq.len() {
                return None;
            }
            let advanced = if self.coeffs.is_empty() {
                self.coeffs = vec![0; self.depth + 1];
                self.coeffs[self.depth] = 1;
                true
            } else {
                advance_lex(&mut self.coeffs, k, 1)
            };
            if !advanced {
                self.depth += 1;
                self.coeffs.clear();
                continue;
            }
            if self.coeffs.contains(&k) {
                return Some((self.coeffs.clone(), self.seq.theta_dense(&self.coeffs)));
            }
        }
    }
}

/// Lexicographic successor in `{0..k}^d` where the last coordinate is kept
/// at least `last_min`. Returns false once the range is exhausted.
fn advance_lex(coeffs: &mut [u32], k: u32, last_min: u32) -> bool {
    let last = coeffs.len() - 1;
    for idx in (0..coeffs.len()).rev() {
        if coeffs[idx] < k {
            coeffs[idx] += 1;
            for (j, c) in coeffs.iter_mut().enumerate().skip(idx + 1) {
                *c = if j == last { last_min } else { 0 };
            }
            return true;
        }
    }
    false
}

/// All vectors in `{0..k}^d` attaining `k`, lexicographically ascending.
pub fn coefficient_vectors(k: u32, d: usize) -> Vec<Vec<u32>> {
    if d == 0 || k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![0; d];
    loop {
        if current.contains(&k) {
            out.push(current.clone());
        }
        if !advance_lex(&mut current, k, 0) {
            return out;
        }
    }
}

impl fmt::Display for BlockSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, block) in self.blocks.iter().enumerate() {
            if idx > 0 {
                f.write_str(";")?;
            }
            write!(f, "{block}")?;
        }
        Ok(())
    }
}

impl Serialize for BlockSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BlockSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<FinElement>::deserialize(deserializer)?;
        let k = blocks.first().map_or(0, FinElement::rank);
        BlockSequence::new(blocks, k).map_err(serde::de::Error::custom)
    }
}

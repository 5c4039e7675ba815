//! Finite-support functions `ℕ → {0, …, k}` and the partial algebra on them.
//!
//! An element is stored as its sorted list of `(position, value)` pairs with
//! every value in `[1, k]`; absent positions carry the value 0. The ambient
//! bound `k` travels with the element so that tetris can lower it. Membership
//! in `FIN_j` means the rank (largest stored value) is exactly `j`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FinElement {
    entries: Vec<(usize, u32)>,
    k: u32,
}

/// Support statistics: overall extremes and per-value extremes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub mu: Option<usize>,
    pub lambda: Option<usize>,
    /// value → (lambda_i, mu_i)
    pub by_value: BTreeMap<u32, (usize, usize)>,
}

impl Stats {
    pub fn mu_i(&self, i: u32) -> Option<usize> {
        self.by_value.get(&i).map(|&(_, hi)| hi)
    }

    pub fn lambda_i(&self, i: u32) -> Option<usize> {
        self.by_value.get(&i).map(|&(lo, _)| lo)
    }
}

impl FinElement {
    pub fn empty(k: u32) -> Self {
        Self { entries: Vec::new(), k }
    }

    /// Builds an element from unordered entries under ambient bound `k`.
    pub fn new(k: u32, entries: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut entries: Vec<(usize, u32)> = entries.into_iter().collect();
        entries.sort_unstable_by_key(|&(pos, _)| pos);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicatePosition { position: pair[0].0 });
            }
        }
        for &(position, value) in &entries {
            if value == 0 || value > k {
                return Err(Error::ValueOutOfRange { position, value, k });
            }
        }
        Ok(Self { entries, k })
    }

    /// Builds an element whose ambient bound is its own rank.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let entries: Vec<(usize, u32)> = entries.into_iter().collect();
        let k = entries.iter().map(|&(_, v)| v).max().unwrap_or(0);
        Self::new(k, entries)
    }

    pub fn singleton(position: usize, value: u32) -> Self {
        debug_assert!(value >= 1);
        Self { entries: vec![(position, value)], k: value }
    }

    pub(crate) fn from_sorted_unchecked(k: u32, entries: Vec<(usize, u32)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, v)| v >= 1 && v <= k));
        Self { entries, k }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn ambient_k(&self) -> u32 {
        self.k
    }

    /// Same entries under a different ambient bound.
    pub fn with_ambient(&self, k: u32) -> Result<Self> {
        if self.rank() > k {
            return Err(Error::BadRank { expected: k, found: self.rank() });
        }
        Ok(Self { entries: self.entries.clone(), k })
    }

    pub fn rank(&self) -> u32 {
        self.entries.iter().map(|&(_, v)| v).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn value_at(&self, position: usize) -> u32 {
        self.entries
            .binary_search_by_key(&position, |&(p, _)| p)
            .map(|idx| self.entries[idx].1)
            .unwrap_or(0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(p, _)| p).collect()
    }

    pub fn contains_value(&self, value: u32) -> bool {
        self.entries.iter().any(|&(_, v)| v == value)
    }

    /// Largest support position.
    pub fn mu(&self) -> Option<usize> {
        self.entries.last().map(|&(p, _)| p)
    }

    /// Smallest support position.
    pub fn lambda(&self) -> Option<usize> {
        self.entries.first().map(|&(p, _)| p)
    }

    pub fn mu_at(&self, value: u32) -> Option<usize> {
        self.entries.iter().rev().find(|&&(_, v)| v == value).map(|&(p, _)| p)
    }

    pub fn lambda_at(&self, value: u32) -> Option<usize> {
        self.entries.iter().find(|&&(_, v)| v == value).map(|&(p, _)| p)
    }

    /// Ascending positions carrying exactly `value`.
    pub fn positions_of(&self, value: u32) -> Vec<usize> {
        self.entries.iter().filter(|&&(_, v)| v == value).map(|&(p, _)| p).collect()
    }

    pub fn stats(&self) -> Stats {
        let mut by_value = BTreeMap::new();
        for &(p, v) in &self.entries {
            by_value.entry(v).and_modify(|e: &mut (usize, usize)| e.1 = p).or_insert((p, p));
        }
        Stats { mu: self.mu(), lambda: self.lambda(), by_value }
    }

    /// `T(p)(n) = p(n) ∸ 1`.
    pub fn tetris(&self) -> Self {
        self.tetris_n(1)
    }

    pub fn tetris_n(&self, times: u32) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|&&(_, v)| v > times)
            .map(|&(p, v)| (p, v - times))
            .collect();
        Self { entries, k: self.k.saturating_sub(times) }
    }

    /// `max supp(self) < min supp(other)`; undefined for empty operands.
    pub fn block_less(&self, other: &Self) -> Result<bool> {
        match (self.mu(), other.lambda()) {
            (Some(hi), Some(lo)) => Ok(hi < lo),
            _ => Err(Error::EmptyElement),
        }
    }

    /// Block order with the empty element below and above everything.
    pub(crate) fn precedes(&self, other: &Self) -> bool {
        match (self.mu(), other.lambda()) {
            (Some(hi), Some(lo)) => hi < lo,
            _ => true,
        }
    }

    /// Partial addition, defined only for block-ordered operands.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.block_less(other)? {
            return Err(Error::NotBlockOrdered);
        }
        Ok(self.concat(other))
    }

    /// Addition that treats the empty element as an identity.
    pub fn try_sum(&self, other: &Self) -> Result<Self> {
        if !self.precedes(other) {
            return Err(Error::NotBlockOrdered);
        }
        Ok(self.concat(other))
    }

    fn concat(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.len() + other.len());
        entries.extend_from_slice(&self.entries);
        entries.extend_from_slice(&other.entries);
        Self { entries, k: self.k.max(other.k) }
    }

    /// Embeds a rank-`from_l` element into rank `to_k` by raising every
    /// support value by `to_k - from_l`. Zero positions stay zero.
    pub fn embed(&self, from_l: u32, to_k: u32) -> Result<Self> {
        if from_l == 0 || self.rank() != from_l {
            return Err(Error::BadRank { expected: from_l, found: self.rank() });
        }
        if to_k < from_l {
            return Err(Error::InvalidArgument(format!(
                "cannot embed rank {from_l} into smaller rank {to_k}"
            )));
        }
        let shift = to_k - from_l;
        let entries = self.entries.iter().map(|&(p, v)| (p, v + shift)).collect();
        Ok(Self { entries, k: to_k })
    }
}

impl fmt::Display for FinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (p, v)) in self.entries.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}:{v}")?;
        }
        Ok(())
    }
}

impl FromStr for FinElement {
    type Err = Error;

    /// Parses `pos:val,pos:val,…`; the ambient bound becomes the rank.
    fn from_str(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Ok(Self::empty(0));
        }
        let mut entries = Vec::new();
        let mut offset = 0;
        for piece in text.split(',') {
            entries.push(parse_pair(piece, offset)?);
            offset += piece.len() + 1;
        }
        Self::from_entries(entries).map_err(|err| match err {
            Error::ValueOutOfRange { position, .. } => Error::Parse {
                offset: locate_position(text, position),
                message: "values must be at least 1".into(),
            },
            Error::DuplicatePosition { position } => Error::Parse {
                offset: locate_position(text, position),
                message: format!("position {position} repeated"),
            },
            other => other,
        })
    }
}

fn parse_pair(piece: &str, offset: usize) -> Result<(usize, u32)> {
    let Some((pos, val)) = piece.split_once(':') else {
        return Err(Error::Parse { offset, message: format!("expected `pos:val`, got {piece:?}") });
    };
    let position = parse_number::<usize>(pos, offset)?;
    let value = parse_number::<u32>(val, offset + pos.len() + 1)?;
    Ok((position, value))
}

fn parse_number<T: FromStr>(text: &str, offset: usize) -> Result<T> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse { offset, message: format!("expected a natural number, got {text:?}") });
    }
    text.parse()
        .map_err(|_| Error::Parse { offset, message: format!("number {text:?} out of range") })
}

fn locate_position(text: &str, position: usize) -> usize {
    let mut offset = 0;
    for piece in text.split(',') {
        if piece.split_once(':').and_then(|(p, _)| p.parse::<usize>().ok()) == Some(position) {
            return offset;
        }
        offset += piece.len() + 1;
    }
    0
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    entries: Vec<(usize, u32)>,
    k: u32,
}

impl Serialize for FinElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr { entries: self.entries.clone(), k: self.k }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(deserializer)?;
        FinElement::new(repr.k, repr.entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(text: &str) -> FinElement {
        text.parse().unwrap()
    }

    #[test]
    fn support_examples() {
        assert!(el("").support().is_empty());
        assert_eq!(el("3:2,5:1").support(), vec![3, 5]);
        assert_eq!(el("0:1").support(), vec![0]);
    }

    #[test]
    fn stats_examples() {
        let s = el("2:1,5:1,7:3").stats();
        assert_eq!((s.mu, s.lambda), (Some(7), Some(2)));
        assert_eq!((s.mu_i(1), s.lambda_i(1)), (Some(5), Some(2)));
        assert_eq!((s.mu_i(3), s.lambda_i(3)), (Some(7), Some(7)));
        assert_eq!(s.mu_i(2), None);

        let s = el("0:2").stats();
        assert_eq!((s.mu, s.lambda, s.mu_i(2), s.lambda_i(2)), (Some(0), Some(0), Some(0), Some(0)));

        let s = el("").stats();
        assert_eq!((s.mu, s.lambda), (None, None));
        assert!(s.by_value.is_empty());
    }

    #[test]
    fn tetris_examples() {
        let p = FinElement::new(2, [(3, 2), (5, 1)]).unwrap();
        let t = p.tetris();
        assert_eq!(t, FinElement::new(1, [(3, 1)]).unwrap());
        assert_eq!(t.ambient_k(), 1);
        assert!(el("0:1").tetris().is_empty());
        let q = el("1:3,4:1,9:2");
        for j in 3..6 {
            assert!(q.tetris_n(j).is_empty());
        }
        assert_eq!(FinElement::empty(0).tetris().ambient_k(), 0);
    }

    #[test]
    fn block_order_examples() {
        assert!(el("1:2").block_less(&el("4:1,5:2")).unwrap());
        assert!(!el("1:2,6:1").block_less(&el("4:2")).unwrap());
        let p = el("3:1,4:2");
        assert!(!p.block_less(&p).unwrap());
        assert_eq!(el("").block_less(&p), Err(Error::EmptyElement));
        assert_eq!(p.block_less(&el("")), Err(Error::EmptyElement));
    }

    #[test]
    fn add_examples() {
        assert_eq!(el("1:2").add(&el("4:1,5:2")).unwrap(), el("1:2,4:1,5:2"));
        assert_eq!(el("1:2,6:1").add(&el("4:2")), Err(Error::NotBlockOrdered));
        let (p, q) = (el("1:2,2:1"), el("4:1,5:2"));
        assert_eq!(p.add(&q).unwrap().tetris(), p.tetris().try_sum(&q.tetris()).unwrap());
    }

    #[test]
    fn try_sum_treats_empty_as_identity() {
        let p = el("1:2");
        assert_eq!(p.try_sum(&FinElement::empty(2)).unwrap(), p);
        assert_eq!(FinElement::empty(0).try_sum(&p).unwrap(), p);
    }

    #[test]
    fn embed_examples() {
        assert_eq!(el("2:1").embed(1, 3).unwrap(), FinElement::new(3, [(2, 3)]).unwrap());
        let p = el("0:2,3:1");
        assert_eq!(p.embed(2, 2).unwrap(), p);
        assert_eq!(el("0:1,4:1").embed(1, 2).unwrap(), el("0:2,4:2"));
        assert_eq!(el("0:2").embed(1, 3), Err(Error::BadRank { expected: 1, found: 2 }));
        assert!(el("0:1").embed(1, 0).is_err());
    }

    #[test]
    fn embedded_rank_is_target() {
        let p = el("0:1,2:2,5:1");
        assert_eq!(p.embed(2, 5).unwrap().rank(), 5);
    }

    #[test]
    fn text_round_trip_and_canonical_order() {
        assert_eq!(el("3:2,5:1").to_string(), "3:2,5:1");
        assert_eq!(el("").to_string(), "");
        assert_eq!(el("5:1,3:2").to_string(), "3:2,5:1");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let cases = [("3:2,x:1", 4), ("3:2,5", 4), ("3:2,", 4), ("1:0", 0), ("1:1,1:2", 0), ("3: 2", 2)];
        for (text, offset) in cases {
            match text.parse::<FinElement>() {
                Err(Error::Parse { offset: got, .. }) => assert_eq!(got, offset, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn json_shape() {
        let p = FinElement::new(3, [(0, 1), (4, 3)]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"entries":[[0,1],[4,3]],"k":3}"#);
        assert_eq!(serde_json::from_str::<FinElement>(&json).unwrap(), p);
        assert!(serde_json::from_str::<FinElement>(r#"{"entries":[[0,4]],"k":3}"#).is_err());
    }
}

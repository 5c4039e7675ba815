use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fin::FinElement;
use crate::lower_bound::{color as vsg_color, VsgVariant};
use crate::oracle::{ScriptedFamily, StagedApprox};

/// A total coloring of the rank-`k` elements supported in `[0, n)`.
pub trait Coloring: Sync {
    fn k(&self) -> u32;
    fn n(&self) -> usize;
    fn colors(&self) -> u32;
    /// Color of a domain element, in `[0, colors)`.
    fn color(&self, f: &FinElement) -> Result<u32>;
}

/// Every rank-`k` element with support in `[0, n)`, ordered by largest
/// support position and then lexicographically on entries.
pub fn domain(k: u32, n: usize) -> Vec<FinElement> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for top in 0..n {
        let mut layer = Vec::new();
        let mut values = vec![0u32; top + 1];
        values[top] = 1;
        loop {
            if values.contains(&k) {
                let entries = values.iter().enumerate().filter(|(_, &v)| v > 0).map(|(p, &v)| (p, v));
                layer.push(FinElement::new(k, entries).expect("valid by construction"));
            }
            // odometer over positions below `top`, then the value at `top`
            let mut idx = 0;
            loop {
                if idx > top {
                    break;
                }
                let floor = if idx == top { 1 } else { 0 };
                if values[idx] < k {
                    values[idx] += 1;
                    break;
                }
                values[idx] = floor;
                idx += 1;
            }
            if idx > top {
                break;
            }
        }
        layer.sort_by(|a, b| a.entries().cmp(b.entries()));
        out.extend(layer);
    }
    out
}

#[derive(Debug, Clone)]
pub enum Assignment {
    Constant,
    /// Support size mod 2.
    SizeParity,
    /// Smallest support position mod 2.
    MinParity,
    /// Seeded splitmix64 hash of the entries, reduced mod `colors`.
    Hash { seed: u64 },
    Table(HashMap<FinElement, u32>),
    /// The gap-parity coloring of a scripted family on `FIN_{levels+1}`.
    Vsg { family: Arc<ScriptedFamily>, variant: VsgVariant },
}

#[derive(Debug, Clone)]
pub struct ColoringSpec {
    k: u32,
    n: usize,
    colors: u32,
    assignment: Assignment,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl ColoringSpec {
    /// A builtin coloring. Table assignments go through [`ColoringSpec::from_table`].
    pub fn builtin(k: u32, n: usize, colors: u32, assignment: Assignment) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if colors == 0 {
            return Err(Error::InvalidArgument("at least one color is required".into()));
        }
        match &assignment {
            Assignment::SizeParity | Assignment::MinParity if colors < 2 => {
                return Err(Error::InvalidArgument("parity colorings need 2 colors".into()));
            }
            Assignment::Table(_) => {
                return Err(Error::InvalidArgument("use from_table for explicit colorings".into()));
            }
            Assignment::Vsg { family, .. } => {
                let levels = k as usize - 1;
                if levels == 0 || levels > family.levels() {
                    return Err(Error::BadLevel { level: levels, min: 1, max: family.levels() });
                }
                if n > family.x_max() {
                    return Err(Error::DomainExceeded { x: n - 1, x_max: family.x_max() });
                }
                if u64::from(colors) < 1u64 << levels {
                    return Err(Error::InvalidArgument(format!("gap coloring needs {} colors", 1u64 << levels)));
                }
            }
            _ => {}
        }
        Ok(Self { k, n, colors, assignment })
    }

    /// An explicit coloring; must cover exactly the domain.
    pub fn from_table(k: u32, n: usize, colors: u32, entries: impl IntoIterator<Item = (FinElement, u32)>) -> Result<Self> {
        if k == 0 || colors == 0 {
            return Err(Error::InvalidArgument("k and colors must be at least 1".into()));
        }
        let mut table = HashMap::new();
        for (elem, c) in entries {
            if elem.rank() != k || elem.mu().is_some_and(|m| m >= n) {
                return Err(Error::InvalidArgument(format!("{elem} is outside the domain (k = {k}, n = {n})")));
            }
            if c >= colors {
                return Err(Error::InvalidArgument(format!("color {c} of {elem} is not below {colors}")));
            }
            let elem = elem.with_ambient(k)?;
            if table.insert(elem.clone(), c).is_some() {
                return Err(Error::InvalidArgument(format!("{elem} is colored twice")));
            }
        }
        let expected = domain(k, n).len();
        if table.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "table colors {} of {expected} domain elements",
                table.len()
            )));
        }
        Ok(Self { k, n, colors, assignment: Assignment::Table(table) })
    }

    /// Parses `<element> <color>` lines; blank lines and `#` comments are skipped.
    pub fn parse_table(k: u32, n: usize, colors: u32, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let lead = line.len() - line.trim_start().len();
            let mut parts = body.split_whitespace();
            let (Some(elem), Some(color), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse { offset: start + lead, message: "expected `<element> <color>`".into() });
            };
            let elem: FinElement = elem.parse().map_err(|err| match err {
                Error::Parse { offset: inner, message } => Error::Parse { offset: start + lead + inner, message },
                other => other,
            })?;
            let color_at = start + lead + body.rfind(color).unwrap_or(0);
            let color: u32 = color
                .parse()
                .map_err(|_| Error::Parse { offset: color_at, message: format!("bad color `{color}`") })?;
            entries.push((elem, color));
        }
        Self::from_table(k, n, colors, entries)
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    /// Is `f` a rank-`k` element supported in `[0, n)`?
    pub fn in_domain(&self, f: &FinElement) -> bool {
        f.rank() == self.k && f.mu().is_some_and(|m| m < self.n)
    }

    /// The coloring as table-file text, one domain element per line in domain order.
    pub fn to_table_text(&self) -> Result<String> {
        let mut out = String::new();
        for elem in domain(self.k, self.n) {
            let c = self.color(&elem)?;
            let _ = writeln!(out, "{elem} {c}");
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<Value> {
        let assignment = match &self.assignment {
            Assignment::Constant => json!({ "builtin": "constant" }),
            Assignment::SizeParity => json!({ "builtin": "size-parity" }),
            Assignment::MinParity => json!({ "builtin": "min-parity" }),
            Assignment::Hash { seed } => json!({ "builtin": "hash", "seed": seed }),
            Assignment::Vsg { variant, .. } => json!({ "builtin": "vsg", "vsg_variant": variant }),
            Assignment::Table(_) => {
                let rows: Result<Vec<Value>> = domain(self.k, self.n)
                    .into_iter()
                    .map(|e| Ok(json!([e.to_string(), self.color(&e)?])))
                    .collect();
                json!({ "table": rows? })
            }
        };
        Ok(json!({ "k": self.k, "n": self.n, "colors": self.colors, "assignment": assignment }))
    }
}

impl Coloring for ColoringSpec {
    fn k(&self) -> u32 {
        self.k
    }

    fn n(&self) -> usize {
        self.n
    }

    fn colors(&self) -> u32 {
        self.colors
    }

    fn color(&self, f: &FinElement) -> Result<u32> {
        if !self.in_domain(f) {
            return Err(Error::InvalidArgument(format!(
                "{f} is outside the coloring domain (k = {}, n = {})",
                self.k, self.n
            )));
        }
        let c = match &self.assignment {
            Assignment::Constant => 0,
            Assignment::SizeParity => (f.len() % 2) as u32,
            Assignment::MinParity => (f.lambda().unwrap_or(0) % 2) as u32,
            Assignment::Hash { seed } => {
                let h = f
                    .entries()
                    .iter()
                    .fold(splitmix64(*seed), |h, &(p, v)| splitmix64(h ^ ((p as u64) << 8 | u64::from(v))));
                (h % u64::from(self.colors)) as u32
            }
            Assignment::Table(table) => {
                let key = if f.ambient_k() == self.k { f.clone() } else { f.with_ambient(self.k)? };
                table[&key]
            }
            Assignment::Vsg { family, variant } => vsg_color(f, family.as_ref(), self.k as usize - 1, *variant)?,
        };
        Ok(c)
    }
}

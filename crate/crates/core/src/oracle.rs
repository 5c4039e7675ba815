//! Computable stand-ins for the iterated jumps `∅, ∅′, …, ∅^(k)`.
//!
//! A [`ScriptedFamily`] fixes, for every level `i ∈ [1, k]` and point
//! `x < x_max`, a stabilization stage `σ_i(x)` and a rule bit `r_i(x)`. The
//! single-level operator `A ↦ A′_s` is
//!
//! ```text
//! A′_s(x) = s mod 2                       if s < σ_i(x)
//!         = parity(|A ∩ [0, x)|) ⊕ r_i(x)  otherwise
//! ```
//!
//! so every level obeys the limit lemma with modulus `max σ_i`, depends on the
//! level below, and has a computable limit. Level 0 is the empty set.
//!
//! Consumers that must not see the limits (the decoder) are written against
//! [`StagedApprox`]; limits and moduli live on [`GroundTruth`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Staged approximations only: everything a decoder is allowed to ask.
pub trait StagedApprox {
    /// Number of jump levels `k`.
    fn levels(&self) -> usize;

    /// Points are drawn from `[0, x_max)`.
    fn x_max(&self) -> usize;

    /// One application of the staged jump operator at level `level`, stage
    /// `stage`, over the lower set `lower`, evaluated at `x`. Only
    /// `lower[..x]` is read.
    fn step_approx(&self, level: usize, stage: usize, lower: &[bool], x: usize) -> Result<bool>;
}

/// Limits and stabilization moduli. Test and construction code only.
pub trait GroundTruth: StagedApprox {
    fn limit_eval(&self, level: usize, x: usize) -> Result<bool>;

    /// A stage `M` such that every stage `s ≥ M` over the true lower level is
    /// correct on `[0, x_bound)`.
    fn modulus(&self, level: usize, x_bound: usize) -> Result<usize>;

    /// The level set on `[0, bound)`.
    fn limit_set(&self, level: usize, bound: usize) -> Result<Vec<bool>> {
        (0..bound).map(|x| self.limit_eval(level, x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelScript {
    pub sigma: Vec<usize>,
    pub rule: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedFamily {
    k: usize,
    x_max: usize,
    levels: Vec<LevelScript>,
}

impl ScriptedFamily {
    /// `levels[i - 1]` scripts level `i`.
    pub fn new(x_max: usize, levels: Vec<LevelScript>) -> Result<Self> {
        let family = Self { k: levels.len(), x_max, levels };
        family.check()?;
        Ok(family)
    }

    fn check(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Schema("at least one level is required".into()));
        }
        if self.levels.len() != self.k {
            return Err(Error::Schema(format!("k = {} but {} level scripts given", self.k, self.levels.len())));
        }
        for (idx, level) in self.levels.iter().enumerate() {
            let i = idx + 1;
            if level.sigma.len() != self.x_max {
                return Err(Error::Schema(format!("level {i}: sigma has {} entries, x_max is {}", level.sigma.len(), self.x_max)));
            }
            if level.rule.len() != self.x_max {
                return Err(Error::Schema(format!("level {i}: rule has {} entries, x_max is {}", level.rule.len(), self.x_max)));
            }
            if let Some(x) = level.rule.iter().position(|&b| b > 1) {
                return Err(Error::Schema(format!("level {i}: rule[{x}] is not a bit")));
            }
        }
        Ok(())
    }

    /// Every level with the same stabilization stage and rule bit everywhere.
    pub fn uniform(k: usize, x_max: usize, sigma: usize, rule: u8) -> Self {
        let level = LevelScript { sigma: vec![sigma; x_max], rule: vec![rule; x_max] };
        Self { k, x_max, levels: vec![level; k] }
    }

    /// Reproducible pseudorandom script: `σ` uniform in `sigma_range`, rule
    /// bits fair coin flips.
    pub fn generate(seed: u64, k: usize, x_max: usize, sigma_range: std::ops::RangeInclusive<usize>) -> Result<Self> {
        if sigma_range.is_empty() {
            return Err(Error::InvalidArgument("sigma range is empty".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels = (0..k)
            .map(|_| {
                let sigma = (0..x_max).map(|_| rng.gen_range(sigma_range.clone())).collect();
                let rule = (0..x_max).map(|_| rng.gen_range(0..=1u8)).collect();
                LevelScript { sigma, rule }
            })
            .collect();
        Ok(Self { k, x_max, levels })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|err| Error::Parse {
            offset: offset_of(text, err.line(), err.column()),
            message: err.to_string(),
        })?;
        let family: Self = serde_json::from_value(value).map_err(|err| Error::Schema(err.to_string()))?;
        family.check()?;
        Ok(family)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serializes")
    }

    pub fn levels_script(&self) -> &[LevelScript] {
        &self.levels
    }

    pub fn sigma(&self, level: usize, x: usize) -> usize {
        self.levels[level - 1].sigma[x]
    }

    pub fn rule(&self, level: usize, x: usize) -> bool {
        self.levels[level - 1].rule[x] == 1
    }

    /// Largest stabilization stage anywhere in the script.
    pub fn max_sigma(&self) -> usize {
        self.levels.iter().flat_map(|l| l.sigma.iter().copied()).max().unwrap_or(0)
    }

    /// Overwrites one script entry; used to craft scenarios.
    pub fn set_point(&mut self, level: usize, x: usize, sigma: usize, rule: u8) -> Result<()> {
        self.check_level(level, 1)?;
        self.check_point(x)?;
        self.levels[level - 1].sigma[x] = sigma;
        self.levels[level - 1].rule[x] = rule.min(1);
        Ok(())
    }

    /// The same script on a larger domain; new points get `sigma` and `rule`.
    pub fn extended(&self, x_max: usize, sigma: usize, rule: u8) -> Self {
        let mut out = self.clone();
        if x_max > self.x_max {
            for level in &mut out.levels {
                level.sigma.resize(x_max, sigma);
                level.rule.resize(x_max, rule.min(1));
            }
            out.x_max = x_max;
        }
        out
    }

    fn check_level(&self, level: usize, min: usize) -> Result<()> {
        if level < min || level > self.k {
            return Err(Error::BadLevel { level, min, max: self.k });
        }
        Ok(())
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.x_max {
            return Err(Error::DomainExceeded { x, x_max: self.x_max });
        }
        Ok(())
    }
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum::<usize>() + column.saturating_sub(1)
}

fn parity(bits: &[bool]) -> bool {
    bits.iter().filter(|&&b| b).count() % 2 == 1
}

impl StagedApprox for ScriptedFamily {
    fn levels(&self) -> usize {
        self.k
    }

    fn x_max(&self) -> usize {
        self.x_max
    }

    fn step_approx(&self, level: usize, stage: usize, lower: &[bool], x: usize) -> Result<bool> {
        self.check_level(level, 1)?;
        self.check_point(x)?;
        if lower.len() < x {
            return Err(Error::InvalidArgument(format!("lower set known on [0, {}), needed [0, {x})", lower.len())));
        }
        if stage < self.sigma(level, x) {
            return Ok(stage % 2 == 1);
        }
        Ok(parity(&lower[..x]) ^ self.rule(level, x))
    }
}

impl GroundTruth for ScriptedFamily {
    fn limit_eval(&self, level: usize, x: usize) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.limit_set(level, x + 1)?[x])
    }

    fn modulus(&self, level: usize, x_bound: usize) -> Result<usize> {
        self.check_level(level, 0)?;
        if x_bound > self.x_max {
            return Err(Error::DomainExceeded { x: x_bound, x_max: self.x_max });
        }
        if level == 0 {
            return Ok(0);
        }
        Ok(self.levels[level - 1].sigma[..x_bound].iter().copied().max().unwrap_or(0))
    }

    fn limit_set(&self, level: usize, bound: usize) -> Result<Vec<bool>> {
        self.check_level(level, 0)?;
        if bound > self.x_max {
            return Err(Error::DomainExceeded { x: bound - 1, x_max: self.x_max });
        }
        let mut current = vec![false; bound];
        for i in 1..=level {
            let mut running = false;
            let mut next = Vec::with_capacity(bound);
            for (x, &below) in current.iter().enumerate() {
                next.push(running ^ self.rule(i, x));
                running ^= below;
            }
            current = next;
        }
        Ok(current)
    }
}

/// The nested approximation `(…(∅′_{s_1})′_{s_2}…)′_{s_i}` on `[0, bound)`.
/// `stages` is outermost first and must cover every level.
pub fn nested_set<O: StagedApprox + ?Sized>(oracle: &O, level: usize, stages: &[usize], bound: usize) -> Result<Vec<bool>> {
    if stages.len() != level {
        return Err(Error::InvalidArgument(format!("level {level} needs {level} stages, got {}", stages.len())));
    }
    let mut current = vec![false; bound];
    for (j, &stage) in stages.iter().rev().enumerate() {
        current = approx_set(oracle, j + 1, stage, &current)?;
    }
    Ok(current)
}

/// One staged application over a lower set, evaluated on `[0, lower.len())`.
pub fn approx_set<O: StagedApprox + ?Sized>(oracle: &O, level: usize, stage: usize, lower: &[bool]) -> Result<Vec<bool>> {
    (0..lower.len()).map(|x| oracle.step_approx(level, stage, lower, x)).collect()
}

/// Nested approximation at one point. A tuple shorter than `level` uses the
/// true sets for the missing inner levels.
pub fn nested_approx<O: GroundTruth + ?Sized>(oracle: &O, level: usize, stages: &[usize], x: usize) -> Result<bool> {
    Ok(nested_approx_set(oracle, level, stages, x + 1)?[x])
}

pub fn nested_approx_set<O: GroundTruth + ?Sized>(oracle: &O, level: usize, stages: &[usize], bound: usize) -> Result<Vec<bool>> {
    if stages.len() > level {
        return Err(Error::InvalidArgument(format!("{} stages given for level {level}", stages.len())));
    }
    let exact = level - stages.len();
    let mut current = oracle.limit_set(exact, bound)?;
    for (offset, &stage) in stages.iter().rev().enumerate() {
        current = approx_set(oracle, exact + offset + 1, stage, &current)?;
    }
    Ok(current)
}

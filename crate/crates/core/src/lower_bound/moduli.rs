//! Iterated limit-lemma moduli.
//!
//! [`find_moduli`] walks from the outermost level inwards, asking at each
//! level for a stage past which the single-step approximation over the true
//! lower level is correct on the range the next level out must read.

use crate::error::{Error, Result};
use crate::oracle::{approx_set, nested_set, GroundTruth, ScriptedFamily, StagedApprox};

/// Stage tuple `(m_n, …, m_1)`, outermost first, such that the nested
/// approximation at these stages agrees with the level-`n` set on `[0, m]`
/// and every level `i` is correct on `[0, m_{i+1}]` for stages `s > m_i`.
///
/// The scripted operator reads the lower set on `[0, x)`, so for `i ≥ 2` the
/// stage is also kept at least `m_{i+1}`: level `i - 1` then covers every
/// point level `i` reads.
pub fn find_moduli<O: GroundTruth + ?Sized>(oracle: &O, m: usize, n: usize) -> Result<Vec<usize>> {
    if m >= oracle.x_max() {
        return Err(Error::DomainExceeded { x: m, x_max: oracle.x_max() });
    }
    if n == 0 || n > oracle.levels() {
        return Err(Error::BadLevel { level: n, min: 1, max: oracle.levels() });
    }
    let mut tuple = Vec::with_capacity(n);
    let mut reach = m;
    for level in (1..=n).rev() {
        let bound = (reach + 1).min(oracle.x_max());
        let modulus = oracle.modulus(level, bound)?;
        let stage = if level >= 2 { modulus.max(reach) } else { modulus };
        tuple.push(stage);
        reach = stage;
    }
    Ok(tuple)
}

/// Headline equality: nested approximation at `tuple` equals the level set on `[0, m]`.
pub fn satisfies_headline(family: &ScriptedFamily, tuple: &[usize], m: usize) -> Result<bool> {
    let n = tuple.len();
    let nested = nested_set(family, n, tuple, m + 1)?;
    Ok(nested == family.limit_set(n, m + 1)?)
}

/// For every level `i` and every stage `s > m_i`, the single-step
/// approximation over the true level `i-1` matches level `i` on
/// `[0, m_{i+1}]` (with `m_{n+1} = m`, clipped to the domain). Stages are
/// scanned up to one past the script's largest stabilization stage, beyond
/// which every stage behaves the same.
pub fn satisfies_limit_property(family: &ScriptedFamily, tuple: &[usize], m: usize) -> Result<bool> {
    let n = tuple.len();
    let horizon = family.max_sigma() + 1;
    for level in 1..=n {
        let own = tuple[n - level];
        let reach = if level == n { m } else { tuple[n - level - 1] };
        let top = reach.min(family.x_max() - 1);
        let truth = family.limit_set(level, top + 1)?;
        let lower = family.limit_set(level - 1, top + 1)?;
        for stage in own + 1..=horizon.max(own + 1) {
            if approx_set(family, level, stage, &lower)? != truth {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_tuples() {
        let family = ScriptedFamily::uniform(3, 10, 0, 1);
        assert!(satisfies_headline(&family, &[0, 0, 0], 9).unwrap());
        assert!(satisfies_limit_property(&family, &[0, 0, 0], 9).unwrap());
        let found = find_moduli(&family, 9, 3).unwrap();
        assert!(satisfies_headline(&family, &found, 9).unwrap());
        assert!(satisfies_limit_property(&family, &found, 9).unwrap());
    }

    #[test]
    fn single_level_is_one_modulus() {
        let family = ScriptedFamily::generate(5, 2, 20, 0..=15).unwrap();
        for m in 0..20 {
            assert_eq!(find_moduli(&family, m, 1).unwrap(), vec![family.modulus(1, m + 1).unwrap()]);
        }
    }

    #[test]
    fn two_levels_on_random_script() {
        let family = ScriptedFamily::generate(21, 2, 12, 0..=20).unwrap();
        let tuple = find_moduli(&family, 8, 2).unwrap();
        assert!(satisfies_headline(&family, &tuple, 8).unwrap());
        assert!(satisfies_limit_property(&family, &tuple, 8).unwrap());
    }

    #[test]
    fn too_small_stage_is_rejected() {
        let mut family = ScriptedFamily::uniform(1, 6, 0, 0);
        family.set_point(1, 2, 5, 0).unwrap();
        // stage 3 < σ(2) = 5 and odd: noise 1 against truth 0
        assert!(!satisfies_headline(&family, &[3], 4).unwrap());
        // s > 2 includes s = 3; s > 3 starts at the even stage 4, which agrees by luck
        assert!(!satisfies_limit_property(&family, &[2], 4).unwrap());
        assert!(satisfies_limit_property(&family, &[3], 4).unwrap());
    }

    #[test]
    fn errors() {
        let family = ScriptedFamily::uniform(2, 6, 0, 0);
        assert!(matches!(find_moduli(&family, 6, 1), Err(Error::DomainExceeded { .. })));
        assert!(matches!(find_moduli(&family, 2, 3), Err(Error::BadLevel { .. })));
        assert!(matches!(find_moduli(&family, 2, 0), Err(Error::BadLevel { .. })));
    }
}

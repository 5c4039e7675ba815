//! End-to-end run: moduli, stable block sequence, exhaustive homogeneity
//! check, level-by-level decoding and a diff against the true sets.

use serde::Serialize;

use super::construct::{build_stable_block_sequence, verify_homogeneous, HomogeneityReport};
use super::decode::decode_levels;
use super::gaps::VsgVariant;
use super::moduli::find_moduli;
use crate::error::{Error, Result};
use crate::oracle::{GroundTruth, ScriptedFamily};
use crate::span::BlockSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub k: usize,
    pub d: usize,
    pub x_bound: usize,
    /// Minimum gap between consecutive blocks; `None` uses `x_bound`, which
    /// puts every block after the first past the decoded range.
    pub spacing: Option<usize>,
    pub variant: VsgVariant,
}

impl PipelineConfig {
    pub fn new(k: usize, d: usize, x_bound: usize) -> Self {
        Self { k, d, x_bound, spacing: None, variant: VsgVariant::Outer }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineStatus {
    /// Decoded sets equal the true sets.
    Ok,
    /// Decoding finished but disagrees with the true sets.
    Diff,
    /// The depth-`d` span is not monochromatic; decoding was refused.
    NotHomogeneous,
    /// The span is too shallow to decode some point.
    SearchExhausted,
    /// Bad parameters or an undersized domain.
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSet {
    pub level: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub level: usize,
    pub x: usize,
    pub decoded: bool,
    pub truth: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub family_id: String,
    pub k: usize,
    pub d: usize,
    pub x_bound: usize,
    pub x_max: usize,
    pub vsg_variant: VsgVariant,
    pub status: PipelineStatus,
    pub error_kind: Option<String>,
    pub error: Option<String>,
    /// `(m_k, …, m_1)` for `[0, x_bound)`.
    pub moduli: Vec<usize>,
    pub blocks: Option<String>,
    pub homogeneity: Option<HomogeneityReport>,
    pub decoded: Vec<LevelSet>,
    pub truth: Vec<LevelSet>,
    pub diff: Vec<DiffEntry>,
}

impl PipelineReport {
    /// 0 when decoding matched, 1 for a clean negative, 2 for errors.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            PipelineStatus::Ok => 0,
            PipelineStatus::Diff | PipelineStatus::NotHomogeneous | PipelineStatus::SearchExhausted => 1,
            PipelineStatus::Error => 2,
        }
    }

    fn new(family: &ScriptedFamily, family_id: &str, config: &PipelineConfig) -> Self {
        Self {
            family_id: family_id.to_owned(),
            k: config.k,
            d: config.d,
            x_bound: config.x_bound,
            x_max: crate::oracle::StagedApprox::x_max(family),
            vsg_variant: config.variant,
            status: PipelineStatus::Error,
            error_kind: None,
            error: None,
            moduli: Vec::new(),
            blocks: None,
            homogeneity: None,
            decoded: Vec::new(),
            truth: Vec::new(),
            diff: Vec::new(),
        }
    }

    fn fail(mut self, err: &Error) -> Self {
        self.status = match err {
            Error::SearchExhausted { .. } => PipelineStatus::SearchExhausted,
            _ => PipelineStatus::Error,
        };
        self.error_kind = Some(err.kind().to_owned());
        self.error = Some(err.to_string());
        self
    }
}

fn members(bits: &[bool]) -> Vec<usize> {
    bits.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| x).collect()
}

fn check_config(family: &ScriptedFamily, config: &PipelineConfig) -> Result<Vec<usize>> {
    if config.d == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if config.x_bound == 0 {
        return Err(Error::InvalidArgument("x_bound must be at least 1".into()));
    }
    find_moduli(family, config.x_bound - 1, config.k)
}

/// Builds a stable block sequence for `family` and runs the rest of the pipeline on it.
pub fn run_pipeline(family: &ScriptedFamily, family_id: &str, config: &PipelineConfig) -> PipelineReport {
    let report = PipelineReport::new(family, family_id, config);
    let moduli = match check_config(family, config) {
        Ok(m) => m,
        Err(err) => return report.fail(&err),
    };
    let spacing = config.spacing.unwrap_or(config.x_bound);
    match build_stable_block_sequence(family, config.k, config.d, spacing) {
        Ok(blocks) => finish(report, family, &blocks, config, moduli),
        Err(err) => report.fail(&err),
    }
}

/// Runs homogeneity checking and decoding on caller-supplied blocks.
pub fn run_pipeline_with_blocks(
    family: &ScriptedFamily,
    family_id: &str,
    blocks: &BlockSequence,
    config: &PipelineConfig,
) -> PipelineReport {
    let report = PipelineReport::new(family, family_id, config);
    match check_config(family, config) {
        Ok(moduli) => finish(report, family, blocks, config, moduli),
        Err(err) => report.fail(&err),
    }
}

fn finish(
    mut report: PipelineReport,
    family: &ScriptedFamily,
    blocks: &BlockSequence,
    config: &PipelineConfig,
    moduli: Vec<usize>,
) -> PipelineReport {
    report.moduli = moduli;
    report.blocks = Some(blocks.to_string());
    let homogeneity = match verify_homogeneous(blocks, family, config.k, config.d, config.variant) {
        Ok(h) => h,
        Err(err) => return report.fail(&err),
    };
    let monochromatic = homogeneity.monochromatic;
    report.homogeneity = Some(homogeneity);
    if !monochromatic {
        report.status = PipelineStatus::NotHomogeneous;
        report.error = Some("depth-d span is not monochromatic; decoding refused".into());
        return report;
    }
    let decoded = match decode_levels(blocks, family, config.k, config.x_bound) {
        Ok(d) => d,
        Err(err) => return report.fail(&err),
    };
    for (idx, bits) in decoded.iter().enumerate() {
        let level = idx + 1;
        let truth = match family.limit_set(level, config.x_bound) {
            Ok(t) => t,
            Err(err) => return report.fail(&err),
        };
        for (x, (&got, &want)) in bits.iter().zip(&truth).enumerate() {
            if got != want {
                report.diff.push(DiffEntry { level, x, decoded: got, truth: want });
            }
        }
        report.decoded.push(LevelSet { level, members: members(bits) });
        report.truth.push(LevelSet { level, members: members(&truth) });
    }
    report.status = if report.diff.is_empty() { PipelineStatus::Ok } else { PipelineStatus::Diff };
    report
}

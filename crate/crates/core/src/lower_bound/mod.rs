//! The coloring of `FIN_{k+1}` whose homogeneous subspaces decode the
//! iterated jumps, together with every construction its correctness uses.

pub mod construct;
pub mod decode;
pub mod gaps;
pub mod moduli;
pub mod pipeline;

pub use construct::{
    build_companion, build_stable_block_sequence, build_stable_block_sequence_from, claim2_rows, staircase_block,
    verify_homogeneous, Claim2Row, ColoredElement, HomogeneityReport,
};
pub use decode::{decode_levels, decode_membership, find_decoding_pair};
pub use gaps::{color, gap_pairs, gap_report, mu_tuple, short_gap_count, very_short_gap_count, GapReport, VsgVariant};
pub use moduli::{find_moduli, satisfies_headline, satisfies_limit_property};
pub use pipeline::{run_pipeline, run_pipeline_with_blocks, DiffEntry, LevelSet, PipelineConfig, PipelineReport, PipelineStatus};

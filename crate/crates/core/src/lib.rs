//! Finite-union algebra on `FIN_k`, combinatorial subspaces and a
//! simulated-jump construction showing that homogeneous subspaces for a
//! certain coloring compute iterated jumps.

pub mod error;
pub mod fin;
pub mod lower_bound;
pub mod oracle;
pub mod search;
pub mod span;

pub use error::{Error, Result};
pub use fin::{FinElement, Stats};
pub use oracle::{GroundTruth, LevelScript, ScriptedFamily, StagedApprox};
pub use span::BlockSequence;
pub use search::{Coloring, ColoringSpec};

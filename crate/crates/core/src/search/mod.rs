//! Finite Gowers/Hindman search: monochromatic combinatorial subspaces for a
//! given coloring, finite sums and unions, and colorings that avoid them.

pub mod avoid;
pub mod coloring;
pub mod subspace;
pub mod sums;

pub use avoid::{find_avoidance_coloring, AvoidanceMode};
pub use coloring::{domain, Assignment, Coloring, ColoringSpec};
pub use subspace::{element_to_set, hindman_fu_search, search_subspace, set_to_element, verify_subspace};
pub use sums::{finite_sums, finite_unions};

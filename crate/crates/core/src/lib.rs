//! Exact construction and census of strongly orthogonal subset graphs of
//! root systems.
//!
//! The pipeline runs bottom-up:
//!
//! * [`roots`] builds `G2`, `F4`, `E6`, `E7`, `E8` (and small `A`/`D`
//!   fixtures) in doubled integer coordinates, with reflections and orbits.
//! * [`sos`] enumerates strongly orthogonal subsets and their sums.
//! * [`graph`] builds `Γ(R, k)`, either implicitly through a membership
//!   table or as a compressed adjacency structure, and computes statistics.
//! * [`clique`] finds clique numbers and counts maximum cliques orbit by orbit.
//! * [`sunflower`] classifies maximum cliques by coordinate support.
//! * [`iso`] checks the structural identities between these graphs.

pub mod bitset;
pub mod clique;
pub mod graph;
pub mod iso;
pub mod roots;
pub mod sos;
pub mod sunflower;

pub use roots::{build_root_system, inner_product, RootError, RootSystem, RootSystemKind, RootVector};
pub use sos::{enumerate_sos, strong_orthogonality_graph, vertex_set, SoSet, SosError, VertexSet};
pub use graph::{build_gamma, stats, Adjacency, BuildOptions, Gamma, GraphError, GraphStats, SosGraph};
pub use clique::{clique_number, count_maximum_cliques, CliqueCensus, CliqueError};
pub use sunflower::{count_sunflower_max_cliques, is_sunflower, permutation_subgroup, SunflowerError, SunflowerVerdict};

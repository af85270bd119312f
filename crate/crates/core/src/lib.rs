//! Exact computations on labeled graph groupoids.
//!
//! A finite directed multigraph `G` is doubled into its shadowed graph
//! `Ĝ = G ∪ G⁻¹`. Words over the signed edges of `Ĝ`, reduced by cancelling
//! adjacent `e e⁻¹` pairs, form the graph groupoid. On top of that this crate
//! provides:
//!
//! * [`labeling`]: edge labels, label words, balance vectors and lattice path
//!   counts,
//! * [`automaton`]: the graph automaton, its actions, automaton trees and the
//!   bounded-depth fractaloid test,
//! * [`ncpartitions`]: the noncrossing partition lattice, its Möbius function
//!   and nested partition-dependent evaluation,
//! * [`operators`]: exact sparse right-multiplication and labeling operators
//!   on a truncated graph Hilbert space (the brute-force oracle),
//! * [`moments`]: diagonal-valued moments and free cumulants of the labeling
//!   operators, computed combinatorially.
//!
//! All arithmetic is exact (machine integers for indices, big integers for
//! every count that can grow).

pub mod algebra;
pub mod automaton;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod groupoid;
pub mod labeling;
pub mod moments;
pub mod ncpartitions;
pub mod operators;

pub use algebra::{DiagonalElement, FormalSum};
pub use error::{Error, Result};
pub use graph::{DirectedGraph, EdgeIdx, ShadowedGraph, SignedEdge, ValidationReport, VertexIdx};
pub use groupoid::{EdgeWord, GroupoidElement};
pub use labeling::{Label, LabelWord, LabeledGraph, LabelingMode};
pub use ncpartitions::NoncrossingPartition;

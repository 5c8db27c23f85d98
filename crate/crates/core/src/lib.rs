//! Allocation of external excitation signals for generic identifiability of
//! linear dynamic network model sets in which some modules are known.
//!
//! The pipeline covers the extended graph with edge-disjoint single-source
//! identifiable multi-rooted graphs (SIMUGs), excites one root of every
//! SIMUG that is not already driven by an existing signal, and checks the
//! result with the vertex-disjoint path condition.

pub mod allocation;
pub mod covering;
pub mod error;
mod flow;
pub mod graph;
pub mod identifiability;
#[cfg(test)]
mod properties;
pub mod testkit;

pub use allocation::{allocate, compare_with_baseline, existing_excitation, prune, AllocationPlan, Method};
pub use covering::{
    characteristic_matrix_direct, initial_characteristic_matrix, initial_covering, merge_step, mergeable,
    pseudotree_baseline, reduce_covering, BaselineMode, CharacteristicMatrix, Covering, MergeSymbol,
};
pub use error::{AllocationError, CoveringError, OracleError, ValidationError};
pub use graph::{
    build_extended_graph, compute_roots, edge_disjoint, is_simug, parametrized_in_set, Edge, EdgeKind,
    ExtendedGraph, NetworkModelSpec, NodeId, NodeSet, Simug,
};
pub use identifiability::{
    generic_rank_oracle, max_vertex_disjoint_paths, verify_identifiability, Certificate, ExcitationSet,
};

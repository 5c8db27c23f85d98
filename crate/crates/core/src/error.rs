use thiserror::Error;

use crate::graph::{Edge, NodeId, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("model set has no nodes")]
    NoNodes,
    #[error("edge {edge}: endpoint outside 1..={limit}")]
    OutOfRange { edge: Edge, limit: usize },
    #[error("edge {edge}: self-loop")]
    SelfLoop { edge: Edge },
    #[error("edge {edge}: duplicate edge between the same ordered pair")]
    DuplicateEdge { edge: Edge },
    #[error("noise edge {edge}: source must be an e-node in {}..={}", node_count + 1, node_count + noise_count)]
    NoiseTail { edge: Edge, node_count: usize, noise_count: usize },
    #[error("excited node {node} is not a w-node (1..={node_count})")]
    ExcitedOutOfRange { node: NodeId, node_count: usize },
    #[error("node {node} is not in the graph")]
    UnknownNode { node: NodeId },
    #[error("node {node} is an e-node; parametrized in-sets are defined for w-nodes only")]
    NotAWNode { node: NodeId },
    #[error("edge {edge} has an endpoint outside the vertex set")]
    DanglingEdge { edge: Edge },
    #[error("not a SIMUG: {reason}")]
    NotSimug { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error("nothing to cover: the graph has no edges")]
    NothingToCover,
    #[error("SIMUG {from} is not mergeable to SIMUG {into}")]
    NotMergeable { from: usize, into: usize },
    #[error("index {index} out of range for a covering of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("invalid covering: {reason}")]
    Invalid { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error("identifiability condition still fails after exciting every SIMUG root at nodes {failing:?}")]
    VerificationFailed { failing: NodeSet },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle needs at least one trial")]
    NoTrials,
    #[error("I - G stayed singular after {attempts} random draws")]
    Singular { attempts: usize },
    #[error("graph has {vertices} vertices; exhaustive search is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("vertex set references node {node} outside the graph")]
    UnknownNode { node: NodeId },
}

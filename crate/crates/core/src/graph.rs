//! Network model sets, their extended graph and the structural primitives
//! used by the covering machinery: parametrized in-neighbour sets, root
//! sets of multi-rooted subgraphs, SIMUG validity and edge-disjointness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;

/// 1-based vertex index of the extended graph.
///
/// Indices `1..=L` are w-nodes (measured node signals), indices
/// `L+1..=L+p` are e-nodes (white-noise sources).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(usize);

impl NodeId {
    /// Panics on zero; node indices are 1-based.
    pub fn new(index: usize) -> Self {
        assert!(index >= 1, "node indices are 1-based");
        NodeId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// Position in 0-based dense storage.
    pub fn offset(self) -> usize {
        self.0 - 1
    }

    pub fn is_w_node(self, node_count: usize) -> bool {
        self.0 <= node_count
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type NodeSet = BTreeSet<NodeId>;

/// Builds a node set from raw 1-based indices.
pub fn nodes<I: IntoIterator<Item = usize>>(indices: I) -> NodeSet {
    indices.into_iter().map(NodeId::new).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Parametrized,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn new(tail: usize, head: usize, kind: EdgeKind) -> Self {
        Edge { tail: NodeId::new(tail), head: NodeId::new(head), kind }
    }

    pub fn parametrized(tail: usize, head: usize) -> Self {
        Self::new(tail, head, EdgeKind::Parametrized)
    }

    pub fn fixed(tail: usize, head: usize) -> Self {
        Self::new(tail, head, EdgeKind::Fixed)
    }

    pub fn is_parametrized(&self) -> bool {
        self.kind == EdgeKind::Parametrized
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.tail, self.head)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            EdgeKind::Parametrized => "P",
            EdgeKind::Fixed => "F",
        };
        write!(f, "{}->{} {}", self.tail, self.head, tag)
    }
}

pub type EdgeSet = BTreeSet<Edge>;

/// Sparsity and parametrization pattern of a network model set.
///
/// Only structure is kept: which modules (G entries) and noise couplings
/// (H entries) are present, whether each one is parametrized or known, and
/// which w-nodes already carry an external excitation (rows of R).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkModelSpec {
    pub node_count: usize,
    pub noise_count: usize,
    pub module_edges: Vec<Edge>,
    pub noise_edges: Vec<Edge>,
    pub excited: NodeSet,
}

impl NetworkModelSpec {
    pub fn new(node_count: usize, noise_count: usize) -> Self {
        NetworkModelSpec {
            node_count,
            noise_count,
            module_edges: Vec::new(),
            noise_edges: Vec::new(),
            excited: NodeSet::new(),
        }
    }

    pub fn with_module(mut self, tail: usize, head: usize, kind: EdgeKind) -> Self {
        self.module_edges.push(Edge::new(tail, head, kind));
        self
    }

    /// `source` counts noise sources from 1, so the e-node is `L + source`.
    pub fn with_noise(mut self, source: usize, head: usize, kind: EdgeKind) -> Self {
        self.noise_edges.push(Edge::new(self.node_count + source, head, kind));
        self
    }

    pub fn with_excited<I: IntoIterator<Item = usize>>(mut self, excited: I) -> Self {
        self.excited.extend(excited.into_iter().map(NodeId::new));
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.node_count + self.noise_count
    }

    pub fn w_nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.node_count).map(NodeId::new)
    }

    pub fn e_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (self.node_count + 1..=self.vertex_count()).map(NodeId::new)
    }

    pub fn all_edges(&self) -> impl Iterator<Item = &Edge> {
        self.module_edges.iter().chain(self.noise_edges.iter())
    }

    /// Checks every structural invariant of the model set.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let l = self.node_count;
        let n = self.vertex_count();
        if l == 0 {
            return Err(ValidationError::NoNodes);
        }
        let mut seen = BTreeSet::new();
        for e in &self.module_edges {
            if e.tail.index() > l || e.head.index() > l {
                return Err(ValidationError::OutOfRange { edge: *e, limit: l });
            }
            if e.tail == e.head {
                return Err(ValidationError::SelfLoop { edge: *e });
            }
            if !seen.insert(e.endpoints()) {
                return Err(ValidationError::DuplicateEdge { edge: *e });
            }
        }
        for e in &self.noise_edges {
            if e.tail.index() <= l || e.tail.index() > n {
                return Err(ValidationError::NoiseTail { edge: *e, node_count: l, noise_count: self.noise_count });
            }
            if e.head.index() > l {
                return Err(ValidationError::OutOfRange { edge: *e, limit: l });
            }
            if !seen.insert(e.endpoints()) {
                return Err(ValidationError::DuplicateEdge { edge: *e });
            }
        }
        if let Some(&bad) = self.excited.iter().find(|v| v.index() > l) {
            return Err(ValidationError::ExcitedOutOfRange { node: bad, node_count: l });
        }
        Ok(())
    }
}

/// Dense 0/1 adjacency matrix, entry `(head, tail)` set for edge `tail -> head`.
///
/// Column `i` therefore lists the out-neighbours of vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    dim: usize,
    bits: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn zeros(dim: usize) -> Self {
        AdjacencyMatrix { dim, bits: vec![0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, head: NodeId, tail: NodeId) -> u8 {
        self.bits[head.offset() * self.dim + tail.offset()]
    }

    fn set(&mut self, head: NodeId, tail: NodeId) {
        self.bits[head.offset() * self.dim + tail.offset()] = 1;
    }

    /// Edges encoded by the nonzero entries, as `(tail, head)` pairs.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for h in 0..self.dim {
            for t in 0..self.dim {
                if self.bits[h * self.dim + t] != 0 {
                    out.push((NodeId::new(t + 1), NodeId::new(h + 1)));
                }
            }
        }
        out.sort();
        out
    }
}

/// The extended graph: w-nodes and e-nodes with the edge set split into
/// parametrized and fixed parts.
#[derive(Clone, Debug)]
pub struct ExtendedGraph {
    node_count: usize,
    noise_count: usize,
    edges: Vec<Edge>,
    kinds: BTreeMap<(NodeId, NodeId), EdgeKind>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    adj_p: AdjacencyMatrix,
    adj_f: AdjacencyMatrix,
}

impl ExtendedGraph {
    pub fn vertex_count(&self) -> usize {
        self.node_count + self.noise_count
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn noise_count(&self) -> usize {
        self.noise_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.vertex_count()).map(NodeId::new)
    }

    pub fn w_nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.node_count).map(NodeId::new)
    }

    pub fn e_nodes(&self) -> impl Iterator<Item = NodeId> {
        (self.node_count + 1..=self.vertex_count()).map(NodeId::new)
    }

    pub fn is_w_node(&self, v: NodeId) -> bool {
        v.is_w_node(self.node_count)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() <= self.vertex_count()
    }

    /// All edges, sorted by `(tail, head)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges_p(&self) -> EdgeSet {
        self.edges.iter().copied().filter(Edge::is_parametrized).collect()
    }

    pub fn edges_f(&self) -> EdgeSet {
        self.edges.iter().copied().filter(|e| !e.is_parametrized()).collect()
    }

    pub fn kind(&self, tail: NodeId, head: NodeId) -> Option<EdgeKind> {
        self.kinds.get(&(tail, head)).copied()
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v.offset()]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v.offset()]
    }

    /// Outgoing edges of `v`, sorted by head.
    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = Edge> + '_ {
        self.out_adj[v.offset()].iter().map(move |&h| Edge { tail: v, head: h, kind: self.kinds[&(v, h)] })
    }

    pub fn adjacency_p(&self) -> &AdjacencyMatrix {
        &self.adj_p
    }

    pub fn adjacency_f(&self) -> &AdjacencyMatrix {
        &self.adj_f
    }

    /// Vertices without outgoing edges.
    pub fn sinks(&self) -> NodeSet {
        self.vertices().filter(|v| self.out_adj[v.offset()].is_empty()).collect()
    }

    pub fn is_isolated(&self, v: NodeId) -> bool {
        self.out_adj[v.offset()].is_empty() && self.in_adj[v.offset()].is_empty()
    }

    /// Same vertex set, edges filtered and optionally re-labelled.
    pub fn map_edges<F>(&self, mut f: F) -> ExtendedGraph
    where
        F: FnMut(&Edge) -> Option<Edge>,
    {
        let edges = self.edges.iter().filter_map(&mut f).collect::<Vec<_>>();
        assemble(self.node_count, self.noise_count, edges)
    }
}

fn assemble(node_count: usize, noise_count: usize, mut edges: Vec<Edge>) -> ExtendedGraph {
    let n = node_count + noise_count;
    edges.sort_by_key(|e| (e.tail, e.head));
    let mut kinds = BTreeMap::new();
    let mut out_adj = vec![Vec::new(); n];
    let mut in_adj = vec![Vec::new(); n];
    let mut adj_p = AdjacencyMatrix::zeros(n);
    let mut adj_f = AdjacencyMatrix::zeros(n);
    for e in &edges {
        kinds.insert(e.endpoints(), e.kind);
        out_adj[e.tail.offset()].push(e.head);
        in_adj[e.head.offset()].push(e.tail);
        match e.kind {
            EdgeKind::Parametrized => adj_p.set(e.head, e.tail),
            EdgeKind::Fixed => adj_f.set(e.head, e.tail),
        }
    }
    for list in in_adj.iter_mut() {
        list.sort();
    }
    ExtendedGraph { node_count, noise_count, edges, kinds, out_adj, in_adj, adj_p, adj_f }
}

/// Builds the extended graph of a model set after validating it.
pub fn build_extended_graph(spec: &NetworkModelSpec) -> Result<ExtendedGraph, ValidationError> {
    spec.validate()?;
    Ok(assemble(spec.node_count, spec.noise_count, spec.all_edges().copied().collect()))
}

/// Tails of the parametrized edges entering w-node `j`.
pub fn parametrized_in_set(g: &ExtendedGraph, j: NodeId) -> Result<NodeSet, ValidationError> {
    if !g.contains(j) {
        return Err(ValidationError::UnknownNode { node: j });
    }
    if !g.is_w_node(j) {
        return Err(ValidationError::NotAWNode { node: j });
    }
    Ok(g.in_neighbors(j)
        .iter()
        .copied()
        .filter(|&i| g.kind(i, j) == Some(EdgeKind::Parametrized))
        .collect())
}

fn local_adjacency(edges: &EdgeSet) -> (BTreeMap<NodeId, Vec<NodeId>>, BTreeMap<NodeId, Vec<NodeId>>) {
    let mut fwd: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut rev: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in edges {
        fwd.entry(e.tail).or_default().push(e.head);
        rev.entry(e.head).or_default().push(e.tail);
    }
    (fwd, rev)
}

fn reach(start: NodeId, adj: &BTreeMap<NodeId, Vec<NodeId>>) -> NodeSet {
    let mut seen = NodeSet::new();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Vertices from which every vertex is reachable using only `edges`.
///
/// The last vertex to finish in a depth-first sweep lies in a source
/// component of the condensation. If that vertex reaches everything, the
/// root set is exactly the set of vertices that reach it; otherwise no
/// vertex reaches everything and the result is empty.
pub fn compute_roots(vertices: &NodeSet, edges: &EdgeSet) -> NodeSet {
    let Some(&first) = vertices.iter().next() else {
        return NodeSet::new();
    };
    let (fwd, rev) = local_adjacency(edges);

    let mut visited = NodeSet::new();
    let mut last_finished = first;
    for &s in vertices {
        if visited.contains(&s) {
            continue;
        }
        visited.insert(s);
        // (vertex, next child position)
        let mut stack = vec![(s, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            let children = fwd.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            if pos < children.len() {
                top.1 += 1;
                let w = children[pos];
                if visited.insert(w) {
                    stack.push((w, 0));
                }
            } else {
                last_finished = v;
                stack.pop();
            }
        }
    }

    if reach(last_finished, &fwd).len() != vertices.len() {
        return NodeSet::new();
    }
    reach(last_finished, &rev)
}

/// Number of parametrized edges entering each head within `edges`.
fn parametrized_in_degrees(edges: &EdgeSet) -> BTreeMap<NodeId, usize> {
    let mut deg = BTreeMap::new();
    for e in edges.iter().filter(|e| e.is_parametrized()) {
        *deg.entry(e.head).or_insert(0) += 1;
    }
    deg
}

/// Heads that receive more than one parametrized edge within `edges`.
pub fn parametrized_conflicts(edges: &EdgeSet) -> NodeSet {
    parametrized_in_degrees(edges).into_iter().filter(|&(_, d)| d > 1).map(|(v, _)| v).collect()
}

pub fn is_simug(vertices: &NodeSet, edges: &EdgeSet) -> bool {
    vertices.len() >= 2
        && parametrized_conflicts(edges).is_empty()
        && !compute_roots(vertices, edges).is_empty()
}

/// A single-source identifiable multi-rooted graph: every vertex is
/// reachable from each root, and no vertex has two incoming parametrized
/// edges inside the subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simug {
    vertices: NodeSet,
    edges: EdgeSet,
    roots: NodeSet,
}

impl Simug {
    pub fn new(vertices: NodeSet, edges: EdgeSet) -> Result<Self, ValidationError> {
        if let Some(e) = edges.iter().find(|e| !vertices.contains(&e.tail) || !vertices.contains(&e.head)) {
            return Err(ValidationError::DanglingEdge { edge: *e });
        }
        if vertices.len() < 2 {
            return Err(ValidationError::NotSimug { reason: "fewer than two vertices".into() });
        }
        if let Some(v) = parametrized_conflicts(&edges).into_iter().next() {
            return Err(ValidationError::NotSimug {
                reason: format!("node {v} has more than one parametrized in-edge"),
            });
        }
        let roots = compute_roots(&vertices, &edges);
        if roots.is_empty() {
            return Err(ValidationError::NotSimug { reason: "no vertex reaches every other vertex".into() });
        }
        Ok(Simug { vertices, edges, roots })
    }

    /// Builds a SIMUG spanned by an edge set.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(edges: I) -> Result<Self, ValidationError> {
        let edges: EdgeSet = edges.into_iter().collect();
        let vertices = edges.iter().flat_map(|e| [e.tail, e.head]).collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &NodeSet {
        &self.vertices
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn roots(&self) -> &NodeSet {
        &self.roots
    }

    pub fn is_fixed_only(&self) -> bool {
        self.edges.iter().all(|e| !e.is_parametrized())
    }

    /// Vertex and edge union of two subgraphs; `None` if it is not a SIMUG.
    pub fn union(&self, other: &Simug) -> Option<Simug> {
        let vertices = self.vertices.union(&other.vertices).copied().collect();
        let edges = self.edges.union(&other.edges).copied().collect();
        Simug::new(vertices, edges).ok()
    }
}

/// Edge-disjointness of two SIMUGs: no shared edge, and every vertex sends
/// all of its outgoing edges (within the two edge sets) into one of them.
pub fn edge_disjoint(t1: &Simug, t2: &Simug) -> bool {
    if t1.edges.iter().any(|e| t2.edges.contains(e)) {
        return false;
    }
    let tails1: NodeSet = t1.edges.iter().map(|e| e.tail).collect();
    t2.edges.iter().all(|e| !tails1.contains(&e.tail))
}

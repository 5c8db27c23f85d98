//! Edge-disjoint SIMUG coverings and the characteristic-matrix merge algebra
//! used to shrink them.
//!
//! The reduction starts from the star covering (one SIMUG per non-sink
//! vertex, holding that vertex and all of its outgoing edges), builds the
//! characteristic matrix from the adjacency matrices, and then repeatedly
//! merges SIMUGs while updating the matrix with the row/column operators
//! instead of recomputing it.

use std::collections::VecDeque;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::CoveringError;
use crate::graph::{
    edge_disjoint, parametrized_conflicts, Edge, EdgeKind, EdgeSet, ExtendedGraph, NodeId, NodeSet, Simug,
};

/// Entry of the characteristic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MergeSymbol {
    /// The row SIMUG is mergeable to the column SIMUG.
    One,
    /// The two SIMUGs can never be combined: their union gives some vertex
    /// two parametrized in-edges.
    Zero,
    /// Compatible, but the column SIMUG's roots do not reach the row SIMUG.
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergeMode {
    Column,
    Row,
}

impl MergeSymbol {
    /// Column operator: commutative.
    pub fn column(a: MergeSymbol, b: MergeSymbol) -> MergeSymbol {
        use MergeSymbol::*;
        match (a, b) {
            (Zero, _) | (_, Zero) => Zero,
            (One, _) | (_, One) => One,
            (Empty, Empty) => Empty,
        }
    }

    /// Row operator; `a` comes from the row being merged away, `b` from the
    /// row it is merged into.
    pub fn row(a: MergeSymbol, b: MergeSymbol) -> MergeSymbol {
        use MergeSymbol::*;
        match (a, b) {
            (One, Empty) => Empty,
            (Empty, One) => One,
            _ => Self::column(a, b),
        }
    }

    fn glyph(self) -> &'static str {
        match self {
            MergeSymbol::One => "1",
            MergeSymbol::Zero => "0",
            MergeSymbol::Empty => "∅",
        }
    }
}

pub fn merge_symbols(a: MergeSymbol, b: MergeSymbol, mode: MergeMode) -> MergeSymbol {
    match mode {
        MergeMode::Column => MergeSymbol::column(a, b),
        MergeMode::Row => MergeSymbol::row(a, b),
    }
}

/// An ordered list of pairwise edge-disjoint SIMUGs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Covering {
    simugs: Vec<Simug>,
}

impl Covering {
    pub fn new(simugs: Vec<Simug>) -> Self {
        Covering { simugs }
    }

    pub fn empty() -> Self {
        Covering { simugs: Vec::new() }
    }

    pub fn simugs(&self) -> &[Simug] {
        &self.simugs
    }

    pub fn len(&self) -> usize {
        self.simugs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simugs.is_empty()
    }

    pub fn covered_edges(&self) -> EdgeSet {
        self.simugs.iter().flat_map(|t| t.edges().iter().copied()).collect()
    }

    /// Identity of each SIMUG: the vertices whose stars were merged into it,
    /// which are exactly the tails of its edges.
    pub fn identities(&self) -> Vec<NodeSet> {
        self.simugs.iter().map(|t| t.edges().iter().map(|e| e.tail).collect()).collect()
    }

    /// Checks that this is an edge-disjoint SIMUG covering of `edges`.
    pub fn validate(&self, edges: &EdgeSet) -> Result<(), CoveringError> {
        for (k, t) in self.simugs.iter().enumerate() {
            if crate::graph::Simug::new(t.vertices().clone(), t.edges().clone()).is_err() {
                return Err(CoveringError::Invalid { reason: format!("member {k} is not a SIMUG") });
            }
        }
        for a in 0..self.simugs.len() {
            for b in a + 1..self.simugs.len() {
                if !edge_disjoint(&self.simugs[a], &self.simugs[b]) {
                    return Err(CoveringError::Invalid { reason: format!("members {a} and {b} are not edge-disjoint") });
                }
            }
        }
        if &self.covered_edges() != edges {
            return Err(CoveringError::Invalid { reason: "edge union differs from the target edge set".into() });
        }
        Ok(())
    }
}

/// Square matrix over {1, 0, ∅} recording pairwise mergeability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicMatrix {
    n: usize,
    entries: Vec<MergeSymbol>,
    index_map: Vec<NodeSet>,
}

impl CharacteristicMatrix {
    fn filled(index_map: Vec<NodeSet>) -> Self {
        let n = index_map.len();
        CharacteristicMatrix { n, entries: vec![MergeSymbol::Zero; n * n], index_map }
    }

    pub fn from_rows(rows: Vec<Vec<MergeSymbol>>, index_map: Vec<NodeSet>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n) && index_map.len() == n, "square matrix expected");
        CharacteristicMatrix { n, entries: rows.into_iter().flatten().collect(), index_map }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> MergeSymbol {
        self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, s: MergeSymbol) {
        self.entries[i * self.n + j] = s;
    }

    pub fn row(&self, i: usize) -> &[MergeSymbol] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<MergeSymbol>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn index_map(&self) -> &[NodeSet] {
        &self.index_map
    }

    fn count(&self, i: usize, s: MergeSymbol) -> usize {
        self.row(i).iter().filter(|&&x| x == s).count()
    }
}

impl fmt::Display for CharacteristicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<&str> = self.row(i).iter().map(|s| s.glyph()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// One star per non-sink vertex, in ascending vertex order.
pub fn initial_covering(g: &ExtendedGraph) -> Result<Covering, CoveringError> {
    if g.edge_count() == 0 {
        return Err(CoveringError::NothingToCover);
    }
    let simugs = g
        .vertices()
        .filter(|&v| !g.out_neighbors(v).is_empty())
        .map(|v| Simug::from_edges(g.out_edges(v)).expect("a star is a SIMUG"))
        .collect();
    Ok(Covering::new(simugs))
}

fn reaches_all(from: NodeId, targets: &NodeSet, edges: &EdgeSet) -> bool {
    let mut seen = NodeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for e in edges.range(Edge { tail: v, head: NodeId::new(1), kind: EdgeKind::Parametrized }..) {
            if e.tail != v {
                break;
            }
            if seen.insert(e.head) {
                queue.push_back(e.head);
            }
        }
    }
    targets.is_subset(&seen)
}

/// Whether `t1` can be merged to `t2`: the union is a SIMUG and every root
/// of `t2` reaches every vertex of `t1` inside the union.
pub fn mergeable(t1: &Simug, t2: &Simug) -> bool {
    let edges: EdgeSet = t1.edges().union(t2.edges()).copied().collect();
    if !parametrized_conflicts(&edges).is_empty() {
        return false;
    }
    t2.roots().iter().all(|&r| reaches_all(r, t1.vertices(), &edges))
}

fn direct_symbol(ti: &Simug, tj: &Simug) -> MergeSymbol {
    if mergeable(ti, tj) {
        return MergeSymbol::One;
    }
    let edges: EdgeSet = ti.edges().union(tj.edges()).copied().collect();
    if parametrized_conflicts(&edges).is_empty() {
        MergeSymbol::Empty
    } else {
        MergeSymbol::Zero
    }
}

/// Characteristic matrix evaluated entry by entry from the definition.
pub fn characteristic_matrix_direct(cov: &Covering) -> CharacteristicMatrix {
    let mut m = CharacteristicMatrix::filled(cov.identities());
    for (i, ti) in cov.simugs().iter().enumerate() {
        for (j, tj) in cov.simugs().iter().enumerate() {
            if i != j {
                m.set(i, j, direct_symbol(ti, tj));
            }
        }
    }
    m
}

/// Characteristic matrix of the star covering computed from the adjacency
/// matrices alone.
///
/// With `W = n A_p - A_f` (n = vertex count), the entry for stars `i`, `j`
/// comes from the complex inner product of column `i` of `W + iI` with
/// column `j` of `W`. A real part of at least `n` means a shared head with
/// two parametrized in-edges; otherwise a nonzero imaginary part means `j`
/// has an edge into `i`.
pub fn initial_characteristic_matrix(g: &ExtendedGraph) -> CharacteristicMatrix {
    let n = g.vertex_count() as i64;
    let (a_p, a_f) = (g.adjacency_p(), g.adjacency_f());
    let w = |head: NodeId, tail: NodeId| n * a_p.get(head, tail) as i64 - a_f.get(head, tail) as i64;

    let stars: Vec<NodeId> = g.vertices().filter(|&v| !g.out_neighbors(v).is_empty()).collect();
    let mut m = CharacteristicMatrix::filled(stars.iter().map(|&v| NodeSet::from([v])).collect());
    for (i, &vi) in stars.iter().enumerate() {
        for (j, &vj) in stars.iter().enumerate() {
            if i == j {
                continue;
            }
            let a: Complex<i64> = g
                .vertices()
                .map(|k| {
                    let left = Complex::new(w(k, vi), if k == vi { 1 } else { 0 });
                    left * Complex::new(w(k, vj), 0)
                })
                .sum();
            let symbol = if a.re >= n {
                MergeSymbol::Zero
            } else if a.im != 0 {
                MergeSymbol::One
            } else {
                MergeSymbol::Empty
            };
            m.set(i, j, symbol);
        }
    }
    m
}

/// Merges SIMUG `i` into SIMUG `j`, updating the matrix algebraically.
///
/// Row `j` becomes `row(M[i,*], M[j,*])`, column `j` becomes
/// `column(M[*,i], M[*,j])`, then row and column `i` are removed. The merged
/// SIMUG takes position `j` (shifted down by one when `i < j`).
pub fn merge_step(
    m: &CharacteristicMatrix,
    cov: &Covering,
    i: usize,
    j: usize,
) -> Result<(CharacteristicMatrix, Covering), CoveringError> {
    let n = m.size();
    for index in [i, j] {
        if index >= n {
            return Err(CoveringError::IndexOutOfRange { index, size: n });
        }
    }
    if i == j || m.get(i, j) != MergeSymbol::One {
        return Err(CoveringError::NotMergeable { from: i, into: j });
    }
    let merged = cov.simugs[i].union(&cov.simugs[j]).ok_or(CoveringError::NotMergeable { from: i, into: j })?;

    let mut full = m.clone();
    for x in (0..n).filter(|&x| x != i && x != j) {
        full.set(j, x, MergeSymbol::row(m.get(i, x), m.get(j, x)));
        full.set(x, j, MergeSymbol::column(m.get(x, i), m.get(x, j)));
    }
    full.set(j, j, MergeSymbol::Zero);

    let keep: Vec<usize> = (0..n).filter(|&x| x != i).collect();
    let mut index_map: Vec<NodeSet> = keep.iter().map(|&x| m.index_map[x].clone()).collect();
    let new_j = if i < j { j - 1 } else { j };
    index_map[new_j] = m.index_map[i].union(&m.index_map[j]).copied().collect();

    let mut reduced = CharacteristicMatrix::filled(index_map);
    for (r, &x) in keep.iter().enumerate() {
        for (c, &y) in keep.iter().enumerate() {
            reduced.set(r, c, full.get(x, y));
        }
    }

    let mut simugs = cov.simugs.clone();
    simugs[j] = merged;
    simugs.remove(i);
    Ok((reduced, Covering::new(simugs)))
}

/// Merge selection: a row with a single `1` first; otherwise the row with
/// the most `∅` entries among rows holding a `1`. Ties go to the lowest row,
/// and within a row to the lowest column.
pub fn select_merge(m: &CharacteristicMatrix) -> Option<(usize, usize)> {
    let first_one = |i: usize| m.row(i).iter().position(|&s| s == MergeSymbol::One);
    let candidates: Vec<usize> = (0..m.size()).filter(|&i| m.count(i, MergeSymbol::One) > 0).collect();
    let row = candidates
        .iter()
        .copied()
        .find(|&i| m.count(i, MergeSymbol::One) == 1)
        .or_else(|| {
            candidates
                .iter()
                .copied()
                .max_by(|&a, &b| m.count(a, MergeSymbol::Empty).cmp(&m.count(b, MergeSymbol::Empty)).then(b.cmp(&a)))
        })?;
    Some((row, first_one(row).expect("candidate rows hold a one")))
}

/// Deterministic merge loop over a covering and its characteristic matrix.
#[derive(Clone, Debug)]
pub struct Reducer {
    matrix: CharacteristicMatrix,
    covering: Covering,
    merges: usize,
}

impl Reducer {
    pub fn new(g: &ExtendedGraph) -> Result<Self, CoveringError> {
        let covering = initial_covering(g)?;
        let matrix = initial_characteristic_matrix(g);
        Ok(Reducer { matrix, covering, merges: 0 })
    }

    pub fn matrix(&self) -> &CharacteristicMatrix {
        &self.matrix
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn merges(&self) -> usize {
        self.merges
    }

    /// Performs one merge; returns the `(from, into)` pair, or `None` once
    /// the matrix has no `1` entries left.
    pub fn step(&mut self) -> Result<Option<(usize, usize)>, CoveringError> {
        let Some((i, j)) = select_merge(&self.matrix) else {
            return Ok(None);
        };
        let (matrix, covering) = merge_step(&self.matrix, &self.covering, i, j)?;
        self.matrix = matrix;
        self.covering = covering;
        self.merges += 1;
        Ok(Some((i, j)))
    }

    pub fn run(mut self) -> Result<Covering, CoveringError> {
        while self.step()?.is_some() {}
        Ok(self.covering)
    }
}

/// Reduced SIMUG covering of all edges of `g`.
pub fn reduce_covering(g: &ExtendedGraph) -> Result<Covering, CoveringError> {
    Reducer::new(g)?.run()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMode {
    /// Every edge treated as parametrized.
    AllEdges,
    /// Fixed edges dropped before covering.
    ParametrizedOnly,
}

/// Graph seen by the pseudotree method: in-degree counts every edge.
pub fn pseudotree_graph(g: &ExtendedGraph, mode: BaselineMode) -> ExtendedGraph {
    g.map_edges(|e| match (mode, e.kind) {
        (BaselineMode::ParametrizedOnly, EdgeKind::Fixed) => None,
        _ => Some(Edge { kind: EdgeKind::Parametrized, ..*e }),
    })
}

/// Pseudotree covering produced by the same merge machinery; empty when the
/// transformed graph has no edges.
pub fn pseudotree_baseline(g: &ExtendedGraph, mode: BaselineMode) -> Covering {
    let h = pseudotree_graph(g, mode);
    match reduce_covering(&h) {
        Ok(cov) => cov,
        Err(CoveringError::NothingToCover) => Covering::empty(),
        Err(e) => unreachable!("merge selection only picks `1` entries: {e}"),
    }
}

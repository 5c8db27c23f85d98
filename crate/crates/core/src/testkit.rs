//! Brute-force oracles and seeded generators used by the property and
//! acceptance suites. Nothing here shares code paths with the algorithms it
//! checks, apart from the identifiability verifier used as the feasibility
//! test of [`exhaustive_min_allocation`].

use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::graph::{Edge, EdgeKind, EdgeSet, ExtendedGraph, NetworkModelSpec, NodeId, NodeSet, Simug};
use crate::identifiability::{verify_identifiability, ExcitationSet};

/// Hand-built model sets shared by tests and documentation.
pub mod fixtures {
    use crate::graph::{EdgeKind, NetworkModelSpec};

    /// Three-node cycle `1 -> 2 -> 3 -> 1`; the closing edge is fixed.
    pub fn three_cycle() -> NetworkModelSpec {
        NetworkModelSpec::new(3, 0)
            .with_module(1, 2, EdgeKind::Parametrized)
            .with_module(2, 3, EdgeKind::Parametrized)
            .with_module(3, 1, EdgeKind::Fixed)
    }

    /// Five-node cycle `5 -> 1 -> 4 -> 2 -> 3 -> 5`.
    ///
    /// The cycle edges into nodes 4 and 5 are fixed, so dropping the fixed
    /// edges leaves nodes 4 and 5 as sources; the whole graph still has at
    /// most one parametrized in-edge per node. Extra fixed edges `2 -> 1`
    /// and `4 -> 5`.
    pub fn five_cycle() -> NetworkModelSpec {
        NetworkModelSpec::new(5, 0)
            .with_module(5, 1, EdgeKind::Parametrized)
            .with_module(1, 4, EdgeKind::Fixed)
            .with_module(4, 2, EdgeKind::Parametrized)
            .with_module(2, 3, EdgeKind::Parametrized)
            .with_module(3, 5, EdgeKind::Fixed)
            .with_module(2, 1, EdgeKind::Fixed)
            .with_module(4, 5, EdgeKind::Fixed)
    }

    /// Eight nodes forming two SIMUGs with root sets {1, 6} and {7, 8}.
    ///
    /// Node 2 is reached from 1 only through a fixed edge, and nodes 2 and
    /// 5 each have one fixed in-edge next to another in-edge, so treating
    /// every module as parametrized forces extra pseudotrees there.
    pub fn two_simug_eight() -> NetworkModelSpec {
        NetworkModelSpec::new(8, 0)
            .with_module(1, 6, EdgeKind::Parametrized)
            .with_module(6, 1, EdgeKind::Parametrized)
            .with_module(1, 2, EdgeKind::Fixed)
            .with_module(2, 3, EdgeKind::Parametrized)
            .with_module(3, 2, EdgeKind::Fixed)
            .with_module(7, 8, EdgeKind::Parametrized)
            .with_module(8, 7, EdgeKind::Parametrized)
            .with_module(7, 5, EdgeKind::Parametrized)
            .with_module(8, 5, EdgeKind::Fixed)
            .with_module(5, 4, EdgeKind::Parametrized)
    }
}

/// Largest graph the exhaustive oracles accept.
pub const EXHAUSTIVE_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomNetworkParams {
    pub node_count: usize,
    pub edge_probability: f64,
    pub fixed_fraction: f64,
    pub noise_count: usize,
    pub seed: u64,
}

impl RandomNetworkParams {
    pub fn is_valid(&self) -> bool {
        self.node_count >= 2
            && (0.0..=1.0).contains(&self.edge_probability)
            && (0.0..=1.0).contains(&self.fixed_fraction)
    }
}

fn kind(rng: &mut ChaCha8Rng, fixed_fraction: f64) -> EdgeKind {
    if rng.random_bool(fixed_fraction) {
        EdgeKind::Fixed
    } else {
        EdgeKind::Parametrized
    }
}

/// Erdős–Rényi style model set: each ordered pair of distinct w-nodes gets
/// an edge with `edge_probability`, each e-node feeds each w-node with the
/// same probability, and each edge is fixed with `fixed_fraction`.
pub fn random_network(params: &RandomNetworkParams) -> NetworkModelSpec {
    assert!(params.is_valid(), "invalid random network parameters: {params:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let l = params.node_count;
    let mut spec = NetworkModelSpec::new(l, params.noise_count);
    for tail in 1..=l {
        for head in (1..=l).filter(|&h| h != tail) {
            if rng.random_bool(params.edge_probability) {
                let k = kind(&mut rng, params.fixed_fraction);
                spec.module_edges.push(Edge::new(tail, head, k));
            }
        }
    }
    for source in 1..=params.noise_count {
        for head in 1..=l {
            if rng.random_bool(params.edge_probability) {
                let k = kind(&mut rng, params.fixed_fraction);
                spec.noise_edges.push(Edge::new(l + source, head, k));
            }
        }
    }
    spec
}

/// Parametrized clusters joined only through fixed edges.
///
/// Each cluster is a random parametrized subgraph in which every node has at
/// most one parametrized in-edge; clusters are then bridged by fixed edges
/// and sprinkled with extra fixed edges.
pub fn bridged_network(seed: u64, clusters: usize, cluster_size: usize) -> NetworkModelSpec {
    assert!(clusters >= 2 && cluster_size >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = clusters * cluster_size;
    let mut spec = NetworkModelSpec::new(l, 0);
    let mut present = std::collections::BTreeSet::new();
    let mut push = |spec: &mut NetworkModelSpec, t: usize, h: usize, k: EdgeKind| {
        if t != h && present.insert((t, h)) {
            spec.module_edges.push(Edge::new(t, h, k));
        }
    };
    for c in 0..clusters {
        let base = c * cluster_size;
        for pos in 1..cluster_size {
            let head = base + pos + 1;
            let tail = base + rng.random_range(0..pos) + 1;
            push(&mut spec, tail, head, EdgeKind::Parametrized);
        }
        if rng.random_bool(0.5) {
            // close a cycle through the cluster's first node
            let tail = base + rng.random_range(1..cluster_size) + 1;
            push(&mut spec, tail, base + 1, EdgeKind::Parametrized);
        }
    }
    for c in 1..clusters {
        let from = rng.random_range(0..c) * cluster_size + rng.random_range(0..cluster_size) + 1;
        let to = c * cluster_size + 1;
        push(&mut spec, from, to, EdgeKind::Fixed);
    }
    for _ in 0..clusters {
        let t = rng.random_range(1..=l);
        let h = rng.random_range(1..=l);
        push(&mut spec, t, h, EdgeKind::Fixed);
    }
    spec
}

fn check_size(g: &ExtendedGraph) -> Result<(), OracleError> {
    if g.vertex_count() > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooLarge { vertices: g.vertex_count(), limit: EXHAUSTIVE_LIMIT });
    }
    Ok(())
}

struct PathSearch<'a> {
    g: &'a ExtendedGraph,
    sources: Vec<NodeId>,
    targets: &'a NodeSet,
    used: Vec<bool>,
    best: usize,
    ceiling: usize,
}

impl PathSearch<'_> {
    fn free_targets(&self) -> usize {
        self.targets.iter().filter(|t| !self.used[t.offset()]).count()
    }

    fn families(&mut self, idx: usize, count: usize) {
        if self.best == self.ceiling {
            return;
        }
        let remaining = self.sources.len() - idx;
        if count + remaining.min(self.free_targets()) <= self.best {
            return;
        }
        if idx == self.sources.len() {
            self.best = self.best.max(count);
            return;
        }
        let s = self.sources[idx];
        if !self.used[s.offset()] {
            self.used[s.offset()] = true;
            self.extend_path(s, idx, count);
            self.used[s.offset()] = false;
        }
        self.families(idx + 1, count);
    }

    /// Walks every simple path from the current end `v`; each time the path
    /// ends in a target, tries the remaining sources on the leftover vertices.
    fn extend_path(&mut self, v: NodeId, idx: usize, count: usize) {
        if self.targets.contains(&v) {
            self.families(idx + 1, count + 1);
        }
        for &w in self.g.out_neighbors(v) {
            if !self.used[w.offset()] {
                self.used[w.offset()] = true;
                self.extend_path(w, idx, count);
                self.used[w.offset()] = false;
            }
        }
    }
}

/// Maximum number of vertex-disjoint `a -> b` paths by exhaustive search
/// over path families; a vertex in both sets is a path on its own.
pub fn brute_force_vdp(g: &ExtendedGraph, a: &NodeSet, b: &NodeSet) -> Result<usize, OracleError> {
    check_size(g)?;
    if let Some(&v) = a.iter().chain(b).find(|&&v| !g.contains(v)) {
        return Err(OracleError::UnknownNode { node: v });
    }
    let mut search = PathSearch {
        g,
        sources: a.iter().copied().collect(),
        targets: b,
        used: vec![false; g.vertex_count()],
        best: 0,
        ceiling: a.len().min(b.len()),
    };
    search.families(0, 0);
    Ok(search.best)
}

/// Smallest set of new w-node excitations (by size, then lexicographic)
/// under which the vertex-disjoint path condition holds.
pub fn exhaustive_min_allocation(
    g: &ExtendedGraph,
    spec: &NetworkModelSpec,
    k_max: usize,
) -> Result<Option<NodeSet>, OracleError> {
    check_size(g)?;
    let candidates: Vec<NodeId> = g.w_nodes().filter(|v| !spec.excited.contains(v)).collect();
    let passes = |extra: &[NodeId]| {
        let mut excited = spec.excited.clone();
        excited.extend(extra.iter().copied());
        verify_identifiability(g, &ExcitationSet::new(g, &excited)).overall
    };
    for size in 0..=k_max.min(candidates.len()) {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<NodeId> = pick.iter().map(|&i| candidates[i]).collect();
            if passes(&chosen) {
                return Ok(Some(chosen.into_iter().collect()));
            }
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&p| pick[p] < candidates.len() - size + p) else {
                break;
            };
            pick[pos] += 1;
            for q in pos + 1..size {
                pick[q] = pick[q - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// Transitive closure by repeated squaring-free relaxation.
fn closure(vertices: &[NodeId], edges: &EdgeSet) -> Vec<Vec<bool>> {
    let n = vertices.len();
    let pos = |v: NodeId| vertices.iter().position(|&x| x == v).unwrap();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in edges {
        r[pos(e.tail)][pos(e.head)] = true;
    }
    for k in 0..n {
        let through = r[k].clone();
        for row in r.iter_mut().filter(|row| row[k]) {
            for (cell, &reach) in row.iter_mut().zip(&through) {
                *cell |= reach;
            }
        }
    }
    r
}

/// Root set by checking every vertex against the transitive closure.
pub fn naive_roots(vertices: &NodeSet, edges: &EdgeSet) -> NodeSet {
    let vs: Vec<NodeId> = vertices.iter().copied().collect();
    let r = closure(&vs, edges);
    vs.iter().enumerate().filter(|(i, _)| r[*i].iter().all(|&x| x)).map(|(_, &v)| v).collect()
}

/// SIMUG test straight from the definition.
pub fn naive_is_simug(vertices: &NodeSet, edges: &EdgeSet) -> bool {
    let bounded = vertices.iter().all(|&v| edges.iter().filter(|e| e.head == v && e.is_parametrized()).count() <= 1);
    vertices.len() >= 2 && bounded && !naive_roots(vertices, edges).is_empty()
}

/// Mergeability of `t1` to `t2` straight from the definition.
pub fn naive_mergeable(t1: &Simug, t2: &Simug) -> bool {
    let vertices: NodeSet = t1.vertices().union(t2.vertices()).copied().collect();
    let edges: EdgeSet = t1.edges().union(t2.edges()).copied().collect();
    if !naive_is_simug(&vertices, &edges) {
        return false;
    }
    let vs: Vec<NodeId> = vertices.iter().copied().collect();
    let r = closure(&vs, &edges);
    let pos = |v: NodeId| vs.iter().position(|&x| x == v).unwrap();
    naive_roots(t2.vertices(), t2.edges())
        .iter()
        .all(|&root| t1.vertices().iter().all(|&v| r[pos(root)][pos(v)]))
}

/// Standard corpus: node counts 2..=12, fixed fractions {0, 0.3, 0.7},
/// a mix of edge densities and noise sources.
pub fn standard_corpus(count: usize, base_seed: u64) -> Vec<RandomNetworkParams> {
    const FIXED: [f64; 3] = [0.0, 0.3, 0.7];
    const DENSITY: [f64; 4] = [0.15, 0.25, 0.35, 0.5];
    (0..count)
        .map(|k| RandomNetworkParams {
            node_count: 2 + k % 11,
            edge_probability: DENSITY[(k / 11) % DENSITY.len()],
            fixed_fraction: FIXED[k % FIXED.len()],
            noise_count: (k / 3) % 3,
            seed: base_seed.wrapping_add(k as u64),
        })
        .collect()
}

/// Writes one JSON object per line so any failing instance can be replayed.
pub fn write_manifest<W: Write>(mut out: W, corpus: &[RandomNetworkParams]) -> io::Result<()> {
    for params in corpus {
        serde_json::to_writer(&mut out, params)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_manifest<R: BufRead>(input: R) -> io::Result<Vec<RandomNetworkParams>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|line| serde_json::from_str(&line?).map_err(io::Error::from))
        .collect()
}

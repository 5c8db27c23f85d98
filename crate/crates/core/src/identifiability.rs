//! Generic identifiability verification through vertex-disjoint path counts,
//! with a randomized generic-rank oracle for cross-validation.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::flow::FlowNetwork;
use crate::graph::{parametrized_in_set, ExtendedGraph, NetworkModelSpec, NodeId, NodeSet};

/// Vertices carrying an independent external signal: excited w-nodes plus
/// every e-node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcitationSet {
    nodes: NodeSet,
}

impl ExcitationSet {
    pub fn new(g: &ExtendedGraph, excited: &NodeSet) -> Self {
        assert!(excited.iter().all(|&v| g.is_w_node(v)), "only w-nodes carry r-signals");
        let mut nodes = excited.clone();
        nodes.extend(g.e_nodes());
        ExcitationSet { nodes }
    }

    pub fn from_spec(g: &ExtendedGraph, spec: &NetworkModelSpec) -> Self {
        Self::new(g, &spec.excited)
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn with(&self, v: NodeId) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.insert(v);
        ExcitationSet { nodes }
    }

    pub fn without(&self, v: NodeId) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.remove(&v);
        ExcitationSet { nodes }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCheck {
    pub node: NodeId,
    pub required: usize,
    pub achieved: usize,
    pub pass: bool,
}

/// Per-node evidence that the vertex-disjoint path condition holds.
///
/// `overall` only states that the sufficient condition is met; a failing
/// certificate does not prove the model set unidentifiable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<NodeCheck>,
    pub overall: bool,
}

impl Certificate {
    pub fn failing(&self) -> NodeSet {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.node).collect()
    }
}

/// Maximum number of pairwise vertex-disjoint directed paths from `a` to `b`.
///
/// Every vertex is split into an in-copy and an out-copy joined by a unit
/// arc. The super-source feeds the in-copies of `a` and the out-copies of
/// `b` drain into the super-sink, so a vertex in both sets can carry its own
/// single-vertex path and no vertex is ever used twice, endpoints included.
pub fn max_vertex_disjoint_paths(g: &ExtendedGraph, a: &NodeSet, b: &NodeSet) -> usize {
    assert!(a.iter().chain(b).all(|&v| g.contains(v)), "vertex sets must lie inside the graph");
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let n = g.vertex_count();
    let (source, sink) = (2 * n, 2 * n + 1);
    let v_in = |v: NodeId| 2 * v.offset();
    let v_out = |v: NodeId| 2 * v.offset() + 1;

    let mut net = FlowNetwork::new(2 * n + 2);
    for v in g.vertices() {
        net.add_arc(v_in(v), v_out(v), 1);
    }
    for e in g.edges() {
        net.add_arc(v_out(e.tail), v_in(e.head), 1);
    }
    for &s in a {
        net.add_arc(source, v_in(s), 1);
    }
    for &t in b {
        net.add_arc(v_out(t), sink, 1);
    }
    net.max_flow(source, sink)
}

/// Checks `b(U -> P_j) = |P_j|` for every w-node `j`.
pub fn verify_identifiability(g: &ExtendedGraph, u: &ExcitationSet) -> Certificate {
    let checks: Vec<NodeCheck> = g
        .w_nodes()
        .map(|j| {
            let targets = parametrized_in_set(g, j).expect("w-node");
            let required = targets.len();
            let achieved = if required == 0 { 0 } else { max_vertex_disjoint_paths(g, u.nodes(), &targets) };
            NodeCheck { node: j, required, achieved, pass: achieved == required }
        })
        .collect();
    let overall = checks.iter().all(|c| c.pass);
    Certificate { checks, overall }
}

const MAX_SINGULAR_REDRAWS: usize = 32;

/// Numeric rank of `[(I - G)^{-1}]` restricted to rows `b` and columns `a`,
/// maximised over `trials` random instantiations of every edge weight.
pub fn generic_rank_oracle(
    g: &ExtendedGraph,
    a: &NodeSet,
    b: &NodeSet,
    trials: usize,
    seed: u64,
) -> Result<usize, OracleError> {
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    if let Some(&v) = a.iter().chain(b).find(|&&v| !g.contains(v)) {
        return Err(OracleError::UnknownNode { node: v });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0);
    }
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<usize> = b.iter().map(|v| v.offset()).collect();
    let cols: Vec<usize> = a.iter().map(|v| v.offset()).collect();
    let mut best = 0;
    for _ in 0..trials {
        let inverse = random_transfer_matrix(g, n, &mut rng)?;
        let scale = inverse.clone().svd(false, false).singular_values.max();
        let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| inverse[(rows[r], cols[c])]);
        best = best.max(numeric_rank(&sub, n as f64 * f64::EPSILON * scale));
        if best == a.len().min(b.len()) {
            break;
        }
    }
    Ok(best)
}

fn random_transfer_matrix(g: &ExtendedGraph, n: usize, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>, OracleError> {
    for _ in 0..MAX_SINGULAR_REDRAWS {
        let mut m = DMatrix::<f64>::identity(n, n);
        for e in g.edges() {
            let magnitude: f64 = rng.random_range(0.5..1.5);
            let weight = if rng.random_bool(0.5) { magnitude } else { -magnitude };
            m[(e.head.offset(), e.tail.offset())] -= weight;
        }
        if let Some(inv) = m.try_inverse() {
            if inv.iter().all(|x| x.is_finite()) {
                return Ok(inv);
            }
        }
    }
    Err(OracleError::Singular { attempts: MAX_SINGULAR_REDRAWS })
}

// The tolerance is scaled by the whole transfer matrix: a structurally zero
// block holds only round-off, and its own largest singular value is noise.
fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_extended_graph, nodes, EdgeKind};

    fn fixture_a() -> ExtendedGraph {
        let spec = NetworkModelSpec::new(3, 0)
            .with_module(1, 2, EdgeKind::Parametrized)
            .with_module(2, 3, EdgeKind::Parametrized)
            .with_module(3, 1, EdgeKind::Fixed);
        build_extended_graph(&spec).unwrap()
    }

    #[test]
    fn single_vertex_paths_count() {
        let g = fixture_a();
        assert_eq!(max_vertex_disjoint_paths(&g, &nodes([1, 2]), &nodes([1, 2])), 2);
        assert_eq!(max_vertex_disjoint_paths(&g, &nodes([]), &nodes([1, 2])), 0);
    }

    #[test]
    fn path_plus_trivial_path() {
        let spec = NetworkModelSpec::new(3, 0).with_module(1, 2, EdgeKind::Parametrized);
        let g = build_extended_graph(&spec).unwrap();
        assert_eq!(max_vertex_disjoint_paths(&g, &nodes([1, 3]), &nodes([2, 3])), 2);
    }

    #[test]
    fn endpoints_are_not_shared() {
        // 1 -> 3 and 2 -> 3: both paths must end in the single target
        let spec = NetworkModelSpec::new(3, 0)
            .with_module(1, 3, EdgeKind::Parametrized)
            .with_module(2, 3, EdgeKind::Parametrized);
        let g = build_extended_graph(&spec).unwrap();
        assert_eq!(max_vertex_disjoint_paths(&g, &nodes([1, 2]), &nodes([3])), 1);
    }

    #[test]
    fn verifies_fixture_a() {
        let g = fixture_a();
        let cert = verify_identifiability(&g, &ExcitationSet::new(&g, &nodes([1])));
        assert!(cert.overall);
        assert_eq!(cert.checks[0], NodeCheck { node: NodeId::new(1), required: 0, achieved: 0, pass: true });
        assert_eq!(cert.checks[1], NodeCheck { node: NodeId::new(2), required: 1, achieved: 1, pass: true });
        assert_eq!(cert.checks[2], NodeCheck { node: NodeId::new(3), required: 1, achieved: 1, pass: true });

        let cert = verify_identifiability(&g, &ExcitationSet::new(&g, &nodes([])));
        assert!(!cert.overall);
        assert_eq!(cert.checks[1], NodeCheck { node: NodeId::new(2), required: 1, achieved: 0, pass: false });
        assert_eq!(cert.failing(), nodes([2, 3]));
    }

    #[test]
    fn two_parametrized_inputs_need_two_sources() {
        let spec = NetworkModelSpec::new(3, 0)
            .with_module(1, 3, EdgeKind::Parametrized)
            .with_module(2, 3, EdgeKind::Parametrized);
        let g = build_extended_graph(&spec).unwrap();
        let cert = verify_identifiability(&g, &ExcitationSet::new(&g, &nodes([1, 2])));
        assert!(cert.overall);
        assert_eq!(cert.checks[2].required, 2);
        assert_eq!(cert.checks[2].achieved, 2);
        assert!(!verify_identifiability(&g, &ExcitationSet::new(&g, &nodes([1]))).overall);
    }

    #[test]
    fn e_nodes_always_excite() {
        let spec = NetworkModelSpec::new(2, 1)
            .with_noise(1, 1, EdgeKind::Parametrized)
            .with_module(1, 2, EdgeKind::Parametrized);
        let g = build_extended_graph(&spec).unwrap();
        let u = ExcitationSet::from_spec(&g, &spec);
        assert_eq!(u.nodes(), &nodes([3]));
        assert!(verify_identifiability(&g, &u).overall);
    }

    #[test]
    fn rank_oracle_small_cases() {
        let g = fixture_a();
        assert_eq!(generic_rank_oracle(&g, &nodes([1]), &nodes([2]), 5, 7).unwrap(), 1);
        assert_eq!(generic_rank_oracle(&g, &nodes([]), &nodes([2]), 5, 7).unwrap(), 0);
        assert_eq!(generic_rank_oracle(&g, &nodes([1]), &nodes([2]), 0, 7), Err(OracleError::NoTrials));

        let spec = NetworkModelSpec::new(3, 0)
            .with_module(1, 3, EdgeKind::Parametrized)
            .with_module(2, 3, EdgeKind::Parametrized);
        let g = build_extended_graph(&spec).unwrap();
        assert_eq!(generic_rank_oracle(&g, &nodes([1, 2]), &nodes([3]), 5, 1).unwrap(), 1);
        assert_eq!(generic_rank_oracle(&g, &nodes([1, 2]), &nodes([1, 2]), 5, 1).unwrap(), 2);
    }
}

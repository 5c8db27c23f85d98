//! Turning a covering into new excitation signals, pruning redundant ones,
//! and comparing against the pseudotree method.

use serde::{Deserialize, Serialize};

use crate::covering::{pseudotree_baseline, pseudotree_graph, reduce_covering, BaselineMode, Covering};
use crate::error::{AllocationError, CoveringError};
use crate::graph::{build_extended_graph, ExtendedGraph, NetworkModelSpec, NodeId, NodeSet, Simug};
use crate::identifiability::{verify_identifiability, Certificate, ExcitationSet};

/// Which covering drives the allocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Simug,
    /// Pseudotrees over the parametrized subgraph; fixed edges are ignored.
    PseudotreeParam,
    /// Pseudotrees over all edges, every edge treated as parametrized.
    PseudotreeAll,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Simug, Method::PseudotreeParam, Method::PseudotreeAll];

    pub fn name(self) -> &'static str {
        match self {
            Method::Simug => "simug",
            Method::PseudotreeParam => "pseudotree-param",
            Method::PseudotreeAll => "pseudotree-all",
        }
    }

    /// The graph the method reasons about.
    fn view(self, g: &ExtendedGraph) -> ExtendedGraph {
        match self {
            Method::Simug => g.clone(),
            Method::PseudotreeParam => pseudotree_graph(g, BaselineMode::ParametrizedOnly),
            Method::PseudotreeAll => pseudotree_graph(g, BaselineMode::AllEdges),
        }
    }

    /// The covering the method allocates from; empty when there are no edges.
    pub fn covering(self, g: &ExtendedGraph) -> Result<Covering, CoveringError> {
        match self {
            Method::Simug => match reduce_covering(g) {
                Err(CoveringError::NothingToCover) => Ok(Covering::empty()),
                other => other,
            },
            Method::PseudotreeParam => Ok(pseudotree_baseline(g, BaselineMode::ParametrizedOnly)),
            Method::PseudotreeAll => Ok(pseudotree_baseline(g, BaselineMode::AllEdges)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reuse {
    pub simug: usize,
    pub node: NodeId,
}

/// Excitation plan for one covering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub method: Method,
    /// w-nodes that receive a fresh r-signal.
    pub new_signals: NodeSet,
    /// SIMUGs already driven by an existing r- or e-signal at a root.
    pub reused: Vec<Reuse>,
    /// SIMUGs made of fixed edges only.
    pub skipped: Vec<usize>,
    pub covering: Covering,
    /// Verified against the true extended graph.
    pub certificate: Certificate,
    /// Set when the fixed-only exemption failed verification and every
    /// SIMUG had to be excited.
    pub fallback: bool,
}

impl AllocationPlan {
    pub fn signal_count(&self) -> usize {
        self.new_signals.len()
    }
}

/// A root of `t` that already carries an r- or e-signal.
pub fn existing_excitation(t: &Simug, spec: &NetworkModelSpec) -> Option<NodeId> {
    t.roots().iter().copied().find(|&v| spec.excited.contains(&v) || !v.is_w_node(spec.node_count))
}

fn lowest_w_root(t: &Simug, node_count: usize) -> Option<NodeId> {
    t.roots().iter().copied().find(|v| v.is_w_node(node_count))
}

fn excitation(g: &ExtendedGraph, spec: &NetworkModelSpec, new_signals: &NodeSet) -> ExcitationSet {
    let excited: NodeSet = spec.excited.union(new_signals).copied().collect();
    ExcitationSet::new(g, &excited)
}

/// Allocation with the SIMUG covering.
pub fn allocate(spec: &NetworkModelSpec) -> Result<AllocationPlan, AllocationError> {
    allocate_with(spec, Method::Simug)
}

pub fn allocate_with(spec: &NetworkModelSpec, method: Method) -> Result<AllocationPlan, AllocationError> {
    let g = build_extended_graph(spec)?;
    let view = method.view(&g);
    let covering = method.covering(&g)?;

    let mut new_signals = NodeSet::new();
    let mut reused = Vec::new();
    let mut skipped = Vec::new();
    for (k, t) in covering.simugs().iter().enumerate() {
        if t.is_fixed_only() {
            skipped.push(k);
        } else if let Some(node) = existing_excitation(t, spec) {
            reused.push(Reuse { simug: k, node });
        } else if !t.roots().iter().any(|r| new_signals.contains(r)) {
            // e-nodes are always roots of the SIMUGs containing them, so a
            // SIMUG without an existing excitation has only w-node roots
            new_signals.insert(lowest_w_root(t, spec.node_count).expect("w-node root"));
        }
    }

    let mut fallback = false;
    let mut certificate = verify_identifiability(&view, &excitation(&view, spec, &new_signals));
    if !certificate.overall {
        fallback = true;
        for &k in &skipped {
            let t = &covering.simugs()[k];
            if existing_excitation(t, spec).is_none() && !t.roots().iter().any(|r| new_signals.contains(r)) {
                new_signals.insert(lowest_w_root(t, spec.node_count).expect("w-node root"));
            }
        }
        certificate = verify_identifiability(&view, &excitation(&view, spec, &new_signals));
        if !certificate.overall {
            return Err(AllocationError::VerificationFailed { failing: certificate.failing() });
        }
    }
    if method != Method::Simug {
        certificate = verify_identifiability(&g, &excitation(&g, spec, &new_signals));
    }
    Ok(AllocationPlan { method, new_signals, reused, skipped, covering, certificate, fallback })
}

/// Drops new signals one at a time, in ascending node order, whenever the
/// vertex-disjoint path condition survives the removal.
///
/// `g` is the graph the check runs on; the certificate of the result is
/// always re-derived on it.
pub fn prune(plan: &AllocationPlan, g: &ExtendedGraph, spec: &NetworkModelSpec) -> AllocationPlan {
    let mut kept = plan.new_signals.clone();
    for s in plan.new_signals.iter() {
        let mut trial = kept.clone();
        trial.remove(s);
        if verify_identifiability(g, &excitation(g, spec, &trial)).overall {
            kept = trial;
        }
    }
    let certificate = verify_identifiability(g, &excitation(g, spec, &kept));
    AllocationPlan { new_signals: kept, certificate, ..plan.clone() }
}

/// Allocation followed by pruning against the graph the method reasons
/// about. The pseudotree methods never see the fixed-edge structure, so
/// they are pruned on their own view; the returned certificate is always
/// evaluated on the true graph.
pub fn allocate_and_prune(spec: &NetworkModelSpec, method: Method) -> Result<AllocationPlan, AllocationError> {
    let g = build_extended_graph(spec)?;
    let plan = allocate_with(spec, method)?;
    let pruned = prune(&plan, &method.view(&g), spec);
    let certificate = verify_identifiability(&g, &excitation(&g, spec, &pruned.new_signals));
    Ok(AllocationPlan { certificate, ..pruned })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub signal_count: usize,
    pub new_signals: NodeSet,
    pub covering_size: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub outcomes: Vec<MethodOutcome>,
}

impl ComparisonReport {
    pub fn outcome(&self, method: Method) -> &MethodOutcome {
        self.outcomes.iter().find(|o| o.method == method).expect("every method is reported")
    }
}

/// Runs the SIMUG method and both pseudotree variants on the same model set.
pub fn compare_with_baseline(spec: &NetworkModelSpec, with_prune: bool) -> Result<ComparisonReport, AllocationError> {
    let outcomes = Method::ALL
        .iter()
        .map(|&method| {
            let plan = if with_prune { allocate_and_prune(spec, method)? } else { allocate_with(spec, method)? };
            Ok(MethodOutcome {
                method,
                signal_count: plan.signal_count(),
                new_signals: plan.new_signals,
                covering_size: plan.covering.len(),
                certificate: plan.certificate,
            })
        })
        .collect::<Result<Vec<_>, AllocationError>>()?;
    Ok(ComparisonReport { outcomes })
}

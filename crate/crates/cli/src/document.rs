//! Network spec documents (JSON or TOML) and their mapping to model sets.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use netid_core::{Edge, EdgeKind, NetworkModelSpec, NodeId, NodeSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Syntax {
    Json,
    Toml,
}

impl Syntax {
    /// By extension, falling back to sniffing the first non-blank byte.
    pub fn detect(path: &Path, text: &str) -> Syntax {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Syntax::Json,
            Some("toml") => Syntax::Toml,
            _ if text.trim_start().starts_with('{') => Syntax::Json,
            _ => Syntax::Toml,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nodes {
    Count(usize),
    Names(Vec<String>),
}

/// A node written either as its 1-based index or as its name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRef {
    Index(usize),
    Name(String),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Index(i) => write!(f, "{i}"),
            NodeRef::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: NodeRef,
    pub to: NodeRef,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseEdgeDoc {
    /// 1-based noise source.
    pub source: usize,
    pub to: NodeRef,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub nodes: Nodes,
    #[serde(default)]
    pub noise_sources: usize,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub noise_edges: Vec<NoiseEdgeDoc>,
    #[serde(default)]
    pub excited: Vec<NodeRef>,
}

/// Labels for reports: w-nodes echo the document's names, e-nodes are `e1..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Names {
    node_count: usize,
    names: Option<Vec<String>>,
}

impl Names {
    pub fn indices(node_count: usize) -> Self {
        Names { node_count, names: None }
    }

    pub fn label(&self, v: NodeId) -> NodeRef {
        if !v.is_w_node(self.node_count) {
            return NodeRef::Name(format!("e{}", v.index() - self.node_count));
        }
        match &self.names {
            Some(names) => NodeRef::Name(names[v.offset()].clone()),
            None => NodeRef::Index(v.index()),
        }
    }

    pub fn labels(&self, set: &NodeSet) -> Vec<NodeRef> {
        set.iter().map(|&v| self.label(v)).collect()
    }

    pub fn resolve(&self, r: &NodeRef) -> Result<NodeId, String> {
        match (r, &self.names) {
            (NodeRef::Index(i), None) if (1..=self.node_count).contains(i) => Ok(NodeId::new(*i)),
            (NodeRef::Index(i), None) => Err(format!("node {i} outside 1..={}", self.node_count)),
            (NodeRef::Index(i), Some(_)) => Err(format!("node {i}: this document names its nodes")),
            (NodeRef::Name(s), Some(names)) => names
                .iter()
                .position(|n| n == s)
                .map(|p| NodeId::new(p + 1))
                .ok_or_else(|| format!("unknown node name {s:?}")),
            (NodeRef::Name(s), None) => Err(format!("node {s:?}: nodes are numbered, not named")),
        }
    }
}

/// A parsed document: the model set plus its naming side table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub spec: NetworkModelSpec,
    pub names: Names,
}

impl SpecDocument {
    pub fn parse(text: &str, syntax: Syntax, origin: &str) -> Result<Self, DocumentError> {
        let parse_err = |message: String| DocumentError::Parse { origin: origin.to_string(), message };
        match syntax {
            Syntax::Json => serde_json::from_str(text).map_err(|e| parse_err(e.to_string())),
            Syntax::Toml => toml::from_str(text).map_err(|e| parse_err(e.to_string())),
        }
    }

    pub fn render(&self, syntax: Syntax) -> String {
        match syntax {
            Syntax::Json => serde_json::to_string_pretty(self).expect("documents serialize") + "\n",
            Syntax::Toml => toml::to_string(self).expect("documents serialize"),
        }
    }

    pub fn to_network(&self, origin: &str) -> Result<Network, DocumentError> {
        let invalid = |message: String| DocumentError::Invalid { origin: origin.to_string(), message };
        let names = match &self.nodes {
            Nodes::Count(n) => Names::indices(*n),
            Nodes::Names(list) => {
                let mut seen = HashMap::new();
                for (k, name) in list.iter().enumerate() {
                    if let Some(first) = seen.insert(name.as_str(), k) {
                        return Err(invalid(format!("node name {name:?} used at positions {} and {}", first + 1, k + 1)));
                    }
                }
                Names { node_count: list.len(), names: Some(list.clone()) }
            }
        };
        let mut spec = NetworkModelSpec::new(names.node_count, self.noise_sources);
        for (k, e) in self.edges.iter().enumerate() {
            let at = |m: String| invalid(format!("edges[{k}]: {m}"));
            let tail = names.resolve(&e.from).map_err(at)?;
            let head = names.resolve(&e.to).map_err(at)?;
            spec.module_edges.push(Edge::new(tail.index(), head.index(), e.kind));
        }
        for (k, e) in self.noise_edges.iter().enumerate() {
            let head = names.resolve(&e.to).map_err(|m| invalid(format!("noise_edges[{k}]: {m}")))?;
            if e.source == 0 || e.source > self.noise_sources {
                return Err(invalid(format!("noise_edges[{k}]: source {} outside 1..={}", e.source, self.noise_sources)));
            }
            spec = spec.with_noise(e.source, head.index(), e.kind);
        }
        for (k, r) in self.excited.iter().enumerate() {
            let v = names.resolve(r).map_err(|m| invalid(format!("excited[{k}]: {m}")))?;
            spec.excited.insert(v);
        }
        spec.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(Network { spec, names })
    }

    /// Canonical form: edges sorted by (from, to), excitations sorted.
    pub fn canonical(net: &Network) -> Self {
        let spec = &net.spec;
        let l = spec.node_count;
        let nodes = match &net.names.names {
            Some(list) => Nodes::Names(list.clone()),
            None => Nodes::Count(l),
        };
        let mut module: Vec<Edge> = spec.module_edges.clone();
        module.sort();
        let mut noise: Vec<Edge> = spec.noise_edges.clone();
        noise.sort();
        SpecDocument {
            nodes,
            noise_sources: spec.noise_count,
            edges: module
                .iter()
                .map(|e| EdgeDoc { from: net.names.label(e.tail), to: net.names.label(e.head), kind: e.kind })
                .collect(),
            noise_edges: noise
                .iter()
                .map(|e| NoiseEdgeDoc { source: e.tail.index() - l, to: net.names.label(e.head), kind: e.kind })
                .collect(),
            excited: net.names.labels(&spec.excited),
        }
    }
}

/// Reads and validates one input file; `-` reads standard input.
pub fn load(path: &Path) -> Result<Network, DocumentError> {
    let origin = path.display().to_string();
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| DocumentError::Parse { origin: origin.clone(), message: e.to_string() })?;
    let doc = SpecDocument::parse(&text, Syntax::detect(path, &text), &origin)?;
    doc.to_network(&origin)
}

//! Graphviz rendering of a covered network.

use std::fmt::Write;

use netid_core::{Covering, ExtendedGraph, NodeId, NodeSet};

use crate::document::Names;

const PALETTE: [&str; 10] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#1f78b4", "#b2df8a", "#fb9a99",
];

fn quoted(names: &Names, v: NodeId) -> String {
    let label = names.label(v).to_string();
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One colour per SIMUG, dashed fixed edges, double border on excited
/// w-nodes and boxes for noise sources. Output depends only on the inputs.
pub fn render(g: &ExtendedGraph, covering: &Covering, excited: &NodeSet, names: &Names) -> String {
    let mut out = String::from("digraph network {\n  node [shape=circle];\n");
    for v in g.vertices() {
        let mut attrs = Vec::new();
        if !g.is_w_node(v) {
            attrs.push("shape=box".to_string());
        } else if excited.contains(&v) {
            attrs.push("peripheries=2".to_string());
        }
        let _ = if attrs.is_empty() {
            writeln!(out, "  {};", quoted(names, v))
        } else {
            writeln!(out, "  {} [{}];", quoted(names, v), attrs.join(", "))
        };
    }
    for e in g.edges() {
        let mut attrs = Vec::new();
        if let Some(k) = covering.simugs().iter().position(|t| t.edges().contains(e)) {
            attrs.push(format!("color=\"{}\"", PALETTE[k % PALETTE.len()]));
            attrs.push(format!("tooltip=\"T{}\"", k + 1));
        }
        if !e.is_parametrized() {
            attrs.push("style=dashed".to_string());
        }
        let _ = writeln!(out, "  {} -> {} [{}];", quoted(names, e.tail), quoted(names, e.head), attrs.join(", "));
    }
    out.push_str("}\n");
    out
}

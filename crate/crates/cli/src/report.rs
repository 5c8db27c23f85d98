//! Report documents. Node fields echo the input's own names.

use std::fmt::Write;

use netid_core::allocation::{AllocationPlan, ComparisonReport};
use netid_core::{Certificate, Covering, EdgeKind, Method};
use serde::Serialize;

use crate::document::{EdgeDoc, Names, NodeRef};

#[derive(Serialize)]
pub struct CheckDoc {
    pub node: NodeRef,
    pub required: usize,
    pub achieved: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generic_rank: Option<usize>,
}

#[derive(Serialize)]
pub struct CertificateDoc {
    pub overall: bool,
    pub failing: Vec<NodeRef>,
    pub checks: Vec<CheckDoc>,
}

impl CertificateDoc {
    pub fn new(cert: &Certificate, names: &Names) -> Self {
        CertificateDoc {
            overall: cert.overall,
            failing: names.labels(&cert.failing()),
            checks: cert
                .checks
                .iter()
                .map(|c| CheckDoc {
                    node: names.label(c.node),
                    required: c.required,
                    achieved: c.achieved,
                    pass: c.pass,
                    generic_rank: None,
                })
                .collect(),
        }
    }

    pub fn text(&self) -> String {
        let with_rank = self.checks.iter().any(|c| c.generic_rank.is_some());
        let mut out = String::from("node      required  achieved");
        out.push_str(if with_rank { "  rank  status\n" } else { "  status\n" });
        for c in &self.checks {
            let _ = write!(out, "{:<9} {:>8}  {:>8}", c.node.to_string(), c.required, c.achieved);
            if let Some(r) = c.generic_rank {
                let _ = write!(out, "  {r:>4}");
            }
            out.push_str(if c.pass { "  ok\n" } else { "  FAIL\n" });
        }
        if self.overall {
            out.push_str("overall: pass\n");
        } else {
            let failing: Vec<String> = self.failing.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "overall: fail at {}", failing.join(", "));
        }
        out
    }
}

#[derive(Serialize)]
pub struct SimugDoc {
    pub index: usize,
    pub roots: Vec<NodeRef>,
    pub vertices: Vec<NodeRef>,
    pub edges: Vec<EdgeDoc>,
}

pub fn covering_docs(cov: &Covering, names: &Names) -> Vec<SimugDoc> {
    cov.simugs()
        .iter()
        .enumerate()
        .map(|(k, t)| SimugDoc {
            index: k + 1,
            roots: names.labels(t.roots()),
            vertices: names.labels(t.vertices()),
            edges: t
                .edges()
                .iter()
                .map(|e| EdgeDoc { from: names.label(e.tail), to: names.label(e.head), kind: e.kind })
                .collect(),
        })
        .collect()
}

fn join(refs: &[NodeRef]) -> String {
    refs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub fn covering_text(simugs: &[SimugDoc]) -> String {
    let mut out = String::new();
    for t in simugs {
        let edges: Vec<String> = t
            .edges
            .iter()
            .map(|e| format!("{}->{}{}", e.from, e.to, if e.kind == EdgeKind::Fixed { " (fixed)" } else { "" }))
            .collect();
        let _ = writeln!(out, "T{} roots {{{}}}: {}", t.index, join(&t.roots), edges.join(", "));
    }
    out
}

#[derive(Serialize)]
pub struct CoverDoc {
    pub input: String,
    pub method: Method,
    pub simugs: Vec<SimugDoc>,
}

#[derive(Serialize)]
pub struct ReuseDoc {
    pub simug: usize,
    pub node: NodeRef,
}

#[derive(Serialize)]
pub struct PlanDoc {
    pub input: String,
    pub method: Method,
    pub pruned: bool,
    pub new_signals: Vec<NodeRef>,
    pub reused: Vec<ReuseDoc>,
    pub skipped: Vec<usize>,
    pub fallback: bool,
    pub covering: Vec<SimugDoc>,
    pub certificate: CertificateDoc,
}

impl PlanDoc {
    pub fn new(input: String, plan: &AllocationPlan, pruned: bool, names: &Names) -> Self {
        PlanDoc {
            input,
            method: plan.method,
            pruned,
            new_signals: names.labels(&plan.new_signals),
            reused: plan.reused.iter().map(|r| ReuseDoc { simug: r.simug + 1, node: names.label(r.node) }).collect(),
            skipped: plan.skipped.iter().map(|k| k + 1).collect(),
            fallback: plan.fallback,
            covering: covering_docs(&plan.covering, names),
            certificate: CertificateDoc::new(&plan.certificate, names),
        }
    }

    pub fn text(&self) -> String {
        let mut out = format!("{} ({}{})\n", self.input, self.method.name(), if self.pruned { ", pruned" } else { "" });
        let _ = writeln!(out, "new signals ({}): {}", self.new_signals.len(), join(&self.new_signals));
        for r in &self.reused {
            let _ = writeln!(out, "T{} already excited at {}", r.simug, r.node);
        }
        for k in &self.skipped {
            let _ = writeln!(out, "T{k} has only fixed edges");
        }
        if self.fallback {
            out.push_str("fixed-only SIMUGs had to be excited as well\n");
        }
        out.push_str(&covering_text(&self.covering));
        out.push_str(&self.certificate.text());
        out
    }
}

#[derive(Serialize)]
pub struct OutcomeDoc {
    pub method: Method,
    pub signal_count: usize,
    pub new_signals: Vec<NodeRef>,
    pub covering_size: usize,
    pub certified: bool,
}

#[derive(Serialize)]
pub struct CompareDoc {
    pub input: String,
    pub pruned: bool,
    pub outcomes: Vec<OutcomeDoc>,
}

impl CompareDoc {
    pub fn new(input: String, report: &ComparisonReport, pruned: bool, names: &Names) -> Self {
        let outcomes = report
            .outcomes
            .iter()
            .map(|o| OutcomeDoc {
                method: o.method,
                signal_count: o.signal_count,
                new_signals: names.labels(&o.new_signals),
                covering_size: o.covering_size,
                certified: o.certificate.overall,
            })
            .collect();
        CompareDoc { input, pruned, outcomes }
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}\nmethod            signals  covering  certified  new signals\n", self.input);
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{:<17} {:>7}  {:>8}  {:<9}  {}",
                o.method.name(),
                o.signal_count,
                o.covering_size,
                if o.certified { "yes" } else { "no" },
                join(&o.new_signals)
            );
        }
        out
    }
}

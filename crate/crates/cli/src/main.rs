mod document;
mod dot;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netid_core::allocation::{allocate_and_prune, allocate_with};
use netid_core::{
    build_extended_graph, compare_with_baseline, generic_rank_oracle, parametrized_in_set, verify_identifiability,
    AllocationError, ExcitationSet, ExtendedGraph, Method, NodeSet,
};
use serde::Serialize;

use document::{Network, NodeRef, SpecDocument, Syntax};
use report::{CertificateDoc, CompareDoc, CoverDoc, PlanDoc};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "netid", version, about = "Excitation allocation for identifiable dynamic networks")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Simug,
    PseudotreeParam,
    PseudotreeAll,
}

impl From<Baseline> for Method {
    fn from(b: Baseline) -> Method {
        match b {
            Baseline::Simug => Method::Simug,
            Baseline::PseudotreeParam => Method::PseudotreeParam,
            Baseline::PseudotreeAll => Method::PseudotreeAll,
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    /// Cross-check every path count against the randomized generic rank.
    #[arg(long)]
    rank_check: bool,
    /// Seed for the rank check.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random weight draws per rank check.
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the vertex-disjoint path condition for the current excitations.
    Verify {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Replace the document's excited nodes (comma separated; empty for none).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        excite: Option<Vec<String>>,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Print the covering a method allocates from.
    Cover {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Baseline::Simug)]
        baseline: Baseline,
    },
    /// Place new excitation signals.
    Allocate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Baseline::Simug)]
        baseline: Baseline,
        /// Keep every signal the covering asks for.
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Allocate with every method side by side.
    Compare {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        no_prune: bool,
    },
    /// Render the network and its covering as Graphviz DOT.
    ExportDot {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Baseline::Simug)]
        baseline: Baseline,
        /// Show the allocation plan: its covering and the new signals as excited.
        #[arg(long)]
        plan: bool,
        #[arg(long)]
        no_prune: bool,
    },
    /// Print the input in canonical form.
    Normalize {
        input: PathBuf,
        /// Write TOML instead of JSON.
        #[arg(long)]
        toml: bool,
    },
}

/// Per-input result. Exit codes: 0 pass, 1 input error, 2 condition not
/// met, 3 internal invariant breach.
struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn fail(code: u8, stderr: String) -> Self {
        Outcome { code, stdout: String::new(), stderr }
    }
}

fn emit<T: Serialize>(format: Format, doc: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Text => text(doc),
        Format::Structured => serde_json::to_string_pretty(doc).expect("reports serialize") + "\n",
    }
}

fn parse_ref(net: &Network, raw: &str) -> NodeRef {
    match raw.parse::<usize>() {
        Ok(i) if net.names.resolve(&NodeRef::Index(i)).is_ok() => NodeRef::Index(i),
        _ => NodeRef::Name(raw.to_string()),
    }
}

fn allocation_failure(origin: &str, err: AllocationError) -> Outcome {
    match err {
        AllocationError::Validation(e) => Outcome::fail(1, format!("{origin}: {e}\n")),
        AllocationError::VerificationFailed { .. } => Outcome::fail(2, format!("{origin}: {err}\n")),
        AllocationError::Covering(e) => Outcome::fail(3, format!("{origin}: internal error: {e}\n")),
    }
}

/// Fills in the generic rank next to every path count; a disagreement is an
/// invariant breach.
fn rank_check(g: &ExtendedGraph, u: &ExcitationSet, cert: &mut CertificateDoc, oracle: &OracleArgs) -> Result<(), String> {
    for (check, j) in cert.checks.iter_mut().zip(g.w_nodes()) {
        let targets = parametrized_in_set(g, j).map_err(|e| e.to_string())?;
        let rank = generic_rank_oracle(g, u.nodes(), &targets, oracle.trials, oracle.seed).map_err(|e| e.to_string())?;
        check.generic_rank = Some(rank);
        if rank != check.achieved {
            return Err(format!("node {}: {} vertex-disjoint paths but generic rank {rank}", check.node, check.achieved));
        }
    }
    Ok(())
}

fn run_verify(net: &Network, origin: &str, format: Format, excite: Option<&[String]>, oracle: &OracleArgs) -> Outcome {
    let mut spec = net.spec.clone();
    if let Some(list) = excite {
        let mut excited = NodeSet::new();
        for raw in list.iter().filter(|s| !s.is_empty()) {
            match net.names.resolve(&parse_ref(net, raw)) {
                Ok(v) => excited.insert(v),
                Err(e) => return Outcome::fail(1, format!("{origin}: --excite: {e}\n")),
            };
        }
        spec.excited = excited;
    }
    let g = build_extended_graph(&spec).expect("loaded specs are valid");
    let u = ExcitationSet::from_spec(&g, &spec);
    let cert = verify_identifiability(&g, &u);
    let mut doc = CertificateDoc::new(&cert, &net.names);
    if oracle.rank_check {
        if let Err(e) = rank_check(&g, &u, &mut doc, oracle) {
            return Outcome::fail(3, format!("{origin}: rank check: {e}\n"));
        }
    }
    let stdout = emit(format, &doc, |d| format!("{origin}\n{}", d.text()));
    Outcome { code: if cert.overall { 0 } else { 2 }, stdout, stderr: String::new() }
}

fn run_cover(net: &Network, origin: &str, format: Format, method: Method) -> Outcome {
    let g = build_extended_graph(&net.spec).expect("loaded specs are valid");
    let cov = match method.covering(&g) {
        Ok(cov) => cov,
        Err(e) => return Outcome::fail(3, format!("{origin}: internal error: {e}\n")),
    };
    let doc = CoverDoc { input: origin.to_string(), method, simugs: report::covering_docs(&cov, &net.names) };
    Outcome::ok(emit(format, &doc, |d| {
        format!("{} ({}): {} subgraphs\n{}", d.input, d.method.name(), d.simugs.len(), report::covering_text(&d.simugs))
    }))
}

fn run_allocate(net: &Network, origin: &str, format: Format, method: Method, prune: bool, oracle: &OracleArgs) -> Outcome {
    let result = if prune { allocate_and_prune(&net.spec, method) } else { allocate_with(&net.spec, method) };
    let plan = match result {
        Ok(plan) => plan,
        Err(e) => return allocation_failure(origin, e),
    };
    let mut doc = PlanDoc::new(origin.to_string(), &plan, prune, &net.names);
    if oracle.rank_check {
        let g = build_extended_graph(&net.spec).expect("loaded specs are valid");
        let excited: NodeSet = net.spec.excited.union(&plan.new_signals).copied().collect();
        if let Err(e) = rank_check(&g, &ExcitationSet::new(&g, &excited), &mut doc.certificate, oracle) {
            return Outcome::fail(3, format!("{origin}: rank check: {e}\n"));
        }
    }
    let code = if plan.certificate.overall { 0 } else { 2 };
    Outcome { code, stdout: emit(format, &doc, PlanDoc::text), stderr: String::new() }
}

fn run_compare(net: &Network, origin: &str, format: Format, prune: bool) -> Outcome {
    match compare_with_baseline(&net.spec, prune) {
        Ok(report) => Outcome::ok(emit(format, &CompareDoc::new(origin.to_string(), &report, prune, &net.names), CompareDoc::text)),
        Err(e) => allocation_failure(origin, e),
    }
}

fn run_export_dot(net: &Network, origin: &str, method: Method, plan: bool, prune: bool) -> Outcome {
    let g = build_extended_graph(&net.spec).expect("loaded specs are valid");
    if plan {
        let result = if prune { allocate_and_prune(&net.spec, method) } else { allocate_with(&net.spec, method) };
        return match result {
            Ok(p) => {
                let excited: NodeSet = net.spec.excited.union(&p.new_signals).copied().collect();
                Outcome::ok(dot::render(&g, &p.covering, &excited, &net.names))
            }
            Err(e) => allocation_failure(origin, e),
        };
    }
    match method.covering(&g) {
        Ok(cov) => Outcome::ok(dot::render(&g, &cov, &net.spec.excited, &net.names)),
        Err(e) => Outcome::fail(3, format!("{origin}: internal error: {e}\n")),
    }
}

fn run_one(cli: &Cli, path: &Path) -> Outcome {
    let origin = path.display().to_string();
    let net = match document::load(path) {
        Ok(net) => net,
        Err(e) => return Outcome::fail(1, format!("{e}\n")),
    };
    let format = cli.format;
    match &cli.command {
        Command::Verify { excite, oracle, .. } => run_verify(&net, &origin, format, excite.as_deref(), oracle),
        Command::Cover { baseline, .. } => run_cover(&net, &origin, format, (*baseline).into()),
        Command::Allocate { baseline, no_prune, oracle, .. } => {
            run_allocate(&net, &origin, format, (*baseline).into(), !no_prune, oracle)
        }
        Command::Compare { no_prune, .. } => run_compare(&net, &origin, format, !no_prune),
        Command::ExportDot { baseline, plan, no_prune, .. } => {
            run_export_dot(&net, &origin, (*baseline).into(), *plan, !no_prune)
        }
        Command::Normalize { toml, .. } => {
            let syntax = if *toml { Syntax::Toml } else { Syntax::Json };
            Outcome::ok(SpecDocument::canonical(&net).render(syntax))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let inputs: Vec<PathBuf> = match &cli.command {
        Command::Verify { inputs, .. }
        | Command::Cover { inputs, .. }
        | Command::Allocate { inputs, .. }
        | Command::Compare { inputs, .. } => inputs.clone(),
        Command::ExportDot { input, .. } | Command::Normalize { input, .. } => vec![input.clone()],
    };
    // inputs are independent; run them in parallel and report in order
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = inputs.iter().map(|p| s.spawn(|| run_one(&cli, p))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Outcome::fail(3, "internal error: worker panicked\n".into()))).collect()
    });
    let mut code = 0;
    for o in outcomes {
        print!("{}", o.stdout);
        eprint!("{}", o.stderr);
        code = code.max(o.code);
    }
    ExitCode::from(code)
}

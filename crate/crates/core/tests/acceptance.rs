//! Acceptance suite: prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use netid_core::allocation::{allocate_and_prune, allocate_with};
use netid_core::covering::{select_merge, Reducer};
use netid_core::graph::nodes;
use netid_core::testkit::{
    brute_force_vdp, bridged_network, exhaustive_min_allocation, fixtures, random_network, RandomNetworkParams,
};
use netid_core::{
    build_extended_graph, characteristic_matrix_direct, generic_rank_oracle, initial_characteristic_matrix,
    initial_covering, max_vertex_disjoint_paths, verify_identifiability, CharacteristicMatrix, ExcitationSet,
    ExtendedGraph, Method, MergeSymbol, NetworkModelSpec, NodeSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 0x5eed_2024;

fn report(criterion: u32, title: &str, pass: bool, detail: &str) -> bool {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {title} -- {detail}");
    pass
}

/// 200 extended graphs with at most 12 vertices and fixed fractions 0, 0.3, 0.7.
fn equivalence_corpus() -> Vec<RandomNetworkParams> {
    const FIXED: [f64; 3] = [0.0, 0.3, 0.7];
    const DENSITY: [f64; 4] = [0.15, 0.25, 0.35, 0.5];
    (0..200u64)
        .map(|k| {
            let noise_count = (k as usize / 3) % 3;
            RandomNetworkParams {
                node_count: 2 + (k as usize * 7) % (11 - noise_count),
                edge_probability: DENSITY[(k as usize / 5) % DENSITY.len()],
                fixed_fraction: FIXED[k as usize % FIXED.len()],
                noise_count,
                seed: CORPUS_SEED + k,
            }
        })
        .collect()
}

/// At least 300 graphs with at most 8 vertices.
fn small_corpus() -> Vec<RandomNetworkParams> {
    const FIXED: [f64; 3] = [0.0, 0.3, 0.7];
    const DENSITY: [f64; 3] = [0.2, 0.35, 0.5];
    (0..320u64)
        .map(|k| {
            let noise_count = (k as usize / 3) % 3;
            RandomNetworkParams {
                node_count: 2 + (k as usize * 5) % (7 - noise_count),
                edge_probability: DENSITY[(k as usize / 7) % DENSITY.len()],
                fixed_fraction: FIXED[k as usize % FIXED.len()],
                noise_count,
                seed: CORPUS_SEED ^ (0xabcd_0000 + k),
            }
        })
        .collect()
}

fn graph_of(params: &RandomNetworkParams) -> (NetworkModelSpec, ExtendedGraph) {
    let spec = random_network(params);
    let g = build_extended_graph(&spec).expect("generated specs are valid");
    (spec, g)
}

fn random_subset(rng: &mut ChaCha8Rng, g: &ExtendedGraph) -> NodeSet {
    g.vertices().filter(|_| rng.random_bool(0.4)).collect()
}

fn mismatches(a: &CharacteristicMatrix, b: &CharacteristicMatrix) -> usize {
    a.rows().iter().flatten().zip(b.rows().iter().flatten()).filter(|(x, y)| x != y).count()
}

fn criterion_1_motivating_example() -> bool {
    let start = Instant::now();
    let spec = fixtures::five_cycle();
    let plan = allocate_and_prune(&spec, Method::Simug).unwrap();
    let baseline = allocate_and_prune(&spec, Method::PseudotreeParam).unwrap();
    let elapsed = start.elapsed();

    let cycle = nodes([1, 2, 3, 4, 5]);
    let pass = plan.new_signals.len() == 1
        && plan.new_signals.is_subset(&cycle)
        && plan.certificate.overall
        && baseline.new_signals.len() >= 2
        && elapsed < Duration::from_secs(1);
    let detail = format!(
        "simug signals {:?}, certificate {}, parametrized-only pseudotree signals {:?}, {:?}",
        plan.new_signals, plan.certificate.overall, baseline.new_signals, elapsed
    );
    report(1, "motivating example", pass, &detail)
}

fn criterion_2_lemma2_equivalence() -> bool {
    let start = Instant::now();
    let mut total = 0;
    let mut instances = 0;
    for params in equivalence_corpus() {
        let (_, g) = graph_of(&params);
        assert!(g.vertex_count() <= 12);
        if g.edge_count() == 0 {
            continue;
        }
        instances += 1;
        let lemma = initial_characteristic_matrix(&g);
        let direct = characteristic_matrix_direct(&initial_covering(&g).unwrap());
        let bad = mismatches(&lemma, &direct);
        if bad > 0 {
            println!("  mismatch on {params:?}:\n{lemma}vs\n{direct}");
        }
        total += bad;
    }
    let elapsed = start.elapsed();
    let pass = total == 0 && elapsed < Duration::from_secs(30);
    let detail = format!("{instances} graphs with edges, {total} mismatching entries, {elapsed:?}");
    report(2, "initial matrix from adjacency = direct definition", pass, &detail)
}

fn criterion_3_merge_algebra_equivalence() -> bool {
    let mut steps = 0;
    let mut bad_steps = 0;
    // (merged, direct) symbol pairs that disagree
    let mut kinds = std::collections::BTreeMap::<(MergeSymbol, MergeSymbol), usize>::new();
    for params in equivalence_corpus() {
        let (_, g) = graph_of(&params);
        if g.edge_count() == 0 {
            continue;
        }
        let mut reducer = Reducer::new(&g).unwrap();
        while let Some((i, j)) = reducer.step().unwrap() {
            steps += 1;
            let direct = characteristic_matrix_direct(reducer.covering());
            let bad = mismatches(reducer.matrix(), &direct);
            if bad > 0 {
                bad_steps += 1;
                println!("  step {i}->{j} on {params:?}: {bad} entries differ");
                let (merged, fresh) = (reducer.matrix().rows(), direct.rows());
                for (x, y) in merged.iter().flatten().zip(fresh.iter().flatten()).filter(|(x, y)| x != y) {
                    *kinds.entry((*x, *y)).or_default() += 1;
                }
            }
        }
        assert!(select_merge(reducer.matrix()).is_none());
    }
    let pass = bad_steps == 0;
    let detail = format!("{steps} merge steps, {bad_steps} with mismatching matrices, (merged, direct) pairs {kinds:?}");
    report(3, "merged matrix = direct definition after every step", pass, &detail)
}

fn criterion_4_path_count_oracles() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let corpus = small_corpus();
    let mut brute_mismatch = 0;
    let mut comparisons = 0;
    let mut rank_disagree = 0;
    for (k, params) in corpus.iter().enumerate() {
        let (_, g) = graph_of(params);
        assert!(g.vertex_count() <= 8);
        for pair in 0..4 {
            let (a, b) = (random_subset(&mut rng, &g), random_subset(&mut rng, &g));
            let flow = max_vertex_disjoint_paths(&g, &a, &b);
            if flow != brute_force_vdp(&g, &a, &b).unwrap() {
                brute_mismatch += 1;
                println!("  brute-force mismatch on {params:?}, A={a:?}, B={b:?}");
            }
            let rank = generic_rank_oracle(&g, &a, &b, 10, (k * 4 + pair) as u64).unwrap();
            comparisons += 1;
            if rank != flow {
                rank_disagree += 1;
                println!("  rank {rank} vs flow {flow} on {params:?}, A={a:?}, B={b:?}");
            }
        }
    }
    let pass = corpus.len() >= 300 && brute_mismatch == 0 && rank_disagree * 1000 <= comparisons;
    let detail = format!(
        "{} graphs, {comparisons} comparisons, {brute_mismatch} brute-force mismatches, {rank_disagree} rank disagreements",
        corpus.len()
    );
    report(4, "max-flow = brute force = generic rank", pass, &detail)
}

fn full_corpus() -> Vec<RandomNetworkParams> {
    let mut corpus = equivalence_corpus();
    corpus.extend(small_corpus());
    corpus
}

fn criterion_5_soundness() -> bool {
    let corpus = full_corpus();
    let mut failures = 0;
    for params in &corpus {
        let (spec, g) = graph_of(params);
        let plan = allocate_and_prune(&spec, Method::Simug).unwrap();
        let mut excited = spec.excited.clone();
        excited.extend(plan.new_signals.iter().copied());
        if !verify_identifiability(&g, &ExcitationSet::new(&g, &excited)).overall {
            failures += 1;
            println!("  unsound plan on {params:?}");
        }
    }
    let detail = format!("{} instances, {failures} plans failing verification", corpus.len());
    report(5, "every pruned plan passes the verifier", failures == 0, &detail)
}

fn criterion_6_prune_minimality() -> bool {
    let corpus = full_corpus();
    let mut failures = 0;
    for params in &corpus {
        let (spec, g) = graph_of(params);
        let plan = allocate_and_prune(&spec, Method::Simug).unwrap();
        for &s in &plan.new_signals {
            let mut excited = spec.excited.clone();
            excited.extend(plan.new_signals.iter().copied().filter(|&x| x != s));
            if verify_identifiability(&g, &ExcitationSet::new(&g, &excited)).overall {
                failures += 1;
                println!("  signal {s} removable on {params:?}");
            }
        }
    }
    let detail = format!("{} instances, {failures} removable signals", corpus.len());
    report(6, "no remaining signal is individually removable", failures == 0, &detail)
}

fn criterion_7_conservatism_reduction() -> bool {
    let mut worse = 0;
    let mut strictly_better = 0;
    for seed in 0..50u64 {
        let spec = bridged_network(CORPUS_SEED + seed, 2 + (seed as usize % 3), 3 + (seed as usize % 2));
        let simug = allocate_and_prune(&spec, Method::Simug).unwrap();
        let param = allocate_and_prune(&spec, Method::PseudotreeParam).unwrap();
        assert!(simug.certificate.overall && param.certificate.overall);
        match simug.signal_count().cmp(&param.signal_count()) {
            std::cmp::Ordering::Greater => {
                worse += 1;
                println!("  seed {seed}: simug {} > pseudotree {}", simug.signal_count(), param.signal_count());
            }
            std::cmp::Ordering::Less => strictly_better += 1,
            std::cmp::Ordering::Equal => {}
        }
    }
    let eight = fixtures::two_simug_eight();
    let simug = allocate_and_prune(&eight, Method::Simug).unwrap();
    let param = allocate_and_prune(&eight, Method::PseudotreeParam).unwrap();
    let all = allocate_and_prune(&eight, Method::PseudotreeAll).unwrap();
    let g = build_extended_graph(&eight).unwrap();
    let optimum = exhaustive_min_allocation(&g, &eight, 8).unwrap().expect("exciting every node works");
    let pass = worse == 0
        && strictly_better >= 1
        && simug.signal_count() == 2
        && all.signal_count() == 4
        && optimum.len() == 2;
    let detail = format!(
        "50 bridged networks: {worse} worse, {strictly_better} strictly better; eight-node fixture simug {} / pseudotree-param {} / pseudotree-all {} / exhaustive {}",
        simug.signal_count(),
        param.signal_count(),
        all.signal_count(),
        optimum.len()
    );
    report(7, "SIMUG allocation never exceeds the pseudotree baseline", pass, &detail)
}

fn criterion_8_optimality_gap() -> bool {
    let mut gaps = Vec::new();
    let mut infeasible = 0;
    let mut below_optimum = 0;
    for params in small_corpus() {
        let (spec, g) = graph_of(&params);
        let plan = allocate_and_prune(&spec, Method::Simug).unwrap();
        let mut excited = spec.excited.clone();
        excited.extend(plan.new_signals.iter().copied());
        if !verify_identifiability(&g, &ExcitationSet::new(&g, &excited)).overall {
            infeasible += 1;
        }
        let optimum = exhaustive_min_allocation(&g, &spec, spec.node_count).unwrap().expect("exciting every node works");
        if plan.signal_count() < optimum.len() {
            below_optimum += 1;
        }
        gaps.push(plan.signal_count() as f64 - optimum.len() as f64);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max = gaps.iter().copied().fold(0.0, f64::max);
    let nonzero = gaps.iter().filter(|&&x| x > 0.0).count();
    let pass = infeasible == 0 && below_optimum == 0;
    let detail = format!(
        "{} instances, mean gap {mean:.4}, max gap {max}, {nonzero} with a positive gap, {infeasible} infeasible",
        gaps.len()
    );
    report(8, "optimality gap against exhaustive search", pass, &detail)
}

fn criterion_9_worked_example() -> bool {
    use MergeSymbol::{Empty as E, One as I, Zero as O};
    let spec = fixtures::three_cycle();
    let g = build_extended_graph(&spec).unwrap();
    let matrix_ok = initial_characteristic_matrix(&g).rows() == vec![vec![O, E, I], vec![I, O, E], vec![E, I, O]];

    let mut reducer = Reducer::new(&g).unwrap();
    let first = reducer.step().unwrap();
    let after_first = reducer.matrix().rows() == vec![vec![O, I], vec![I, O]];
    let second = reducer.step().unwrap();
    let done = reducer.step().unwrap().is_none();
    let trace_ok = first == Some((0, 2)) && after_first && second == Some((0, 1)) && done;
    let cov = reducer.covering();
    let roots_ok = cov.len() == 1 && cov.simugs()[0].roots() == &nodes([1, 2, 3]);

    let plan = allocate_with(&spec, Method::Simug).unwrap();
    let plan_ok = plan.new_signals == nodes([1]) && plan.certificate.overall;
    let pass = matrix_ok && trace_ok && roots_ok && plan_ok;
    let detail = format!("matrix {matrix_ok}, trace {trace_ok}, roots {roots_ok}, plan {:?}", plan.new_signals);
    report(9, "three-node worked example", pass, &detail)
}

fn main() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_motivating_example,
        criterion_2_lemma2_equivalence,
        criterion_3_merge_algebra_equivalence,
        criterion_4_path_count_oracles,
        criterion_5_soundness,
        criterion_6_prune_minimality,
        criterion_7_conservatism_reduction,
        criterion_8_optimality_gap,
        criterion_9_worked_example,
    ];
    let mut failed = Vec::new();
    for (k, criterion) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(criterion) {
            Ok(true) => {}
            Ok(false) => failed.push(k + 1),
            Err(_) => {
                println!("[FAIL] criterion {}: panicked", k + 1);
                failed.push(k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}

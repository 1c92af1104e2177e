//! The acceptance criteria, each at its stated tolerance. Prints one
//! PASS/FAIL line per criterion and fails if any criterion fails.
//!
//! Runs without the libtest harness, so the lines are never captured and
//! the timing comparison in criterion 8 is not disturbed by other tests
//! running in parallel.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigUint;
use rand::Rng;
use toproute_core::gain::phi;
use toproute_core::generate::{generate_map, generate_queries, GeneratorConfig, QueryGenConfig};
use toproute_core::index::{dijkstra_cost, HopIndex, Label};
use toproute_core::search::{
    brute_force, completion_upper_bound, estimate_search_space, greedy, pacer, pacer_sc, pacer_with, PacerOptions,
    SearchLimits, SearchOutcome,
};
use toproute_core::{build_hop_index, AggregationSpec, Engine, GainContext, PoiMap, Query};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

const NO_LIMITS: SearchLimits = SearchLimits { time: None, memory_bytes: None };

fn pacer1(inst: &Instance, k: usize) -> SearchOutcome {
    pacer_with(&inst.cands, &inst.ctx, k, PacerOptions::default()).unwrap()
}

fn pacer2(inst: &Instance, k: usize) -> SearchOutcome {
    pacer(&inst.cands, &inst.ctx, k, NO_LIMITS).unwrap()
}

fn bf(inst: &Instance, k: usize) -> SearchOutcome {
    brute_force(&inst.cands, &inst.ctx, k, NO_LIMITS, false).unwrap()
}

/// 1. Exact search equals brute force on small instances.
fn oracle_exactness() -> Verdict {
    let mut rng = rng(101);
    let mut checked = 0;
    let mut largest = 0;
    let mut failures = Vec::new();
    for i in 0..600 {
        let aggregation = i % AGGREGATIONS.len();
        let theta = if (i / 6) % 2 == 0 { 0.0 } else { 2.5 };
        let k = if (i / 12) % 2 == 0 { 1 } else { 5 };
        // Budgets from "direct route only" to several stops.
        let slack = [0.0..60.0, 60.0..250.0, 250.0..450.0, 450.0..650.0][i % 4].clone();
        let inst = oracle_instance(&mut rng, 12, 0, slack, aggregation, theta, k);
        let truth = bf(&inst, k);
        let audit =
            pacer_with(&inst.cands, &inst.ctx, k, PacerOptions { pruning2: true, audit: true, ..Default::default() })
                .unwrap();
        for (name, got) in [("pacer1", pacer1(&inst, k)), ("pacer2", pacer2(&inst, k)), ("pacer2+audit", audit)] {
            if !same_results(truth.topk.entries(), got.topk.entries(), 1e-9) {
                failures.push(format!(
                    "instance {i} {name}: {:?} vs {:?}",
                    summary(truth.topk.entries()),
                    summary(got.topk.entries())
                ));
            }
        }
        largest = largest.max(inst.cands.len());
        checked += 1;
    }
    let mut detail = format!("{checked} instances (n up to {largest}), {} mismatches", failures.len());
    if let Some(first) = failures.first() {
        detail += &format!("; first: {first}");
    }
    verdict(failures.is_empty(), detail)
}

/// 2. gain(state) + UP never falls below the best completion.
fn bound_admissibility() -> Verdict {
    let mut rng = rng(202);
    let mut pairs = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let mut instances = 0;
    while pairs < 10_000 {
        let aggregation = instances % AGGREGATIONS.len();
        let theta = if instances % 3 == 0 { 2.5 } else { 0.0 };
        let inst = oracle_instance(&mut rng, 8, 2, 0.0..600.0, aggregation, theta, 1);
        instances += 1;
        for _ in 0..50 {
            let (seq, cost) = random_open_route(&mut rng, &inst);
            let c = &inst.cands;
            let end = seq.last().copied().unwrap_or(c.source_row());
            let state_gain = inst.ctx.gain(seq.iter().copied().chain([c.source_row()]));
            let up = completion_upper_bound(c, &inst.ctx, &seq, end, cost);
            let best = best_completion(&inst, &mut seq.clone(), end, cost).expect("route is closable");
            let margin = state_gain + up - best;
            worst = worst.min(margin);
            if margin < -1e-9 {
                violations += 1;
            }
            pairs += 1;
        }
    }
    verdict(
        violations == 0,
        format!(
            "{pairs} (state, budget) pairs over {instances} instances, {violations} violations, min slack {worst:.3e}"
        ),
    )
}

/// 3. Gain is nonnegative, monotone and submodular.
fn submodularity() -> Verdict {
    let mut rng = rng(303);
    let kinds = [
        ("power_law", None),
        ("log", Some(AggregationSpec::LogUtility)),
        ("coverage", Some(AggregationSpec::Coverage)),
    ];
    let mut failures = Vec::new();
    for (name, fixed) in kinds {
        let mut bad = 0;
        for t in 0..10_000 {
            let spec = fixed.unwrap_or(AggregationSpec::PowerLaw { alpha: [0.0, 0.5, 1.0, 2.0][t % 4] });
            let rows_n = rng.random_range(2..=10);
            let features = rng.random_range(1..=4);
            let top = if name == "coverage" { 1.0 } else { 5.0 };
            let rows: Vec<Vec<f64>> = (0..rows_n)
                .map(|_| {
                    (0..features)
                        .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..=top) })
                        .collect()
                })
                .collect();
            let mut weights: Vec<f64> = (0..features).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total.max(1e-12));
            let ctx = GainContext::new(spec, weights, rows);
            let v = rng.random_range(0..rows_n);
            let y: Vec<usize> = (0..rows_n).filter(|&r| r != v && rng.random_bool(0.6)).collect();
            let x: Vec<usize> = y.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
            let g = |s: &[usize]| ctx.gain(s.iter().copied());
            let with = |s: &[usize]| ctx.gain(s.iter().copied().chain([v]));
            let ok = g(&x) >= 0.0 && g(&y) >= g(&x) - 1e-9 && with(&x) - g(&x) >= with(&y) - g(&y) - 1e-9;
            if !ok {
                bad += 1;
            }
        }
        if bad > 0 {
            failures.push(format!("{name}: {bad}"));
        }
    }
    verdict(failures.is_empty(), format!("3 x 10000 triples, failures {failures:?}"))
}

/// 4. Hop index distances equal Dijkstra; the pivot example gives 6.
fn index_correctness() -> Verdict {
    let mut rng = rng(404);
    let mut mismatches = 0;
    let mut pairs = 0u64;
    for m in 0..20 {
        let cfg = GeneratorConfig {
            poi_count: rng.random_range(50..=300),
            edge_density: rng.random_range(0.005..0.05),
            feature_count: 3,
            seed: rng.random(),
            directed: m % 2 == 1,
            ..Default::default()
        };
        let map = PoiMap::from_document(&generate_map(&cfg).unwrap()).unwrap();
        let hi = build_hop_index(&map);
        for i in 0..map.len() {
            let truth = toproute_core::index::shortest_costs_from(&map, i);
            for (j, &d) in truth.iter().enumerate() {
                let (a, b) = (map.poi(i).id, map.poi(j).id);
                let got = hi.least_travel_cost(a, b).unwrap();
                if (got - d).abs() > 1e-9 {
                    mismatches += 1;
                }
                pairs += 1;
            }
        }
        // Spot-check the single-pair Dijkstra entry point as well.
        let (a, b) = (map.poi(0).id, map.poi(map.len() - 1).id);
        if (dijkstra_cost(&map, a, b).unwrap() - hi.least_travel_cost(a, b).unwrap()).abs() > 1e-9 {
            mismatches += 1;
        }
    }
    let ids = (1..=6).collect();
    let mut out: Vec<Vec<Label>> = (0..6).map(|i| vec![Label { pivot: i, d: 0.0 }]).collect();
    out[1].push(Label { pivot: 2, d: 5.0 });
    out[4].push(Label { pivot: 2, d: 1.0 });
    let pivot = HopIndex::from_labels(false, ids, out, vec![]).unwrap().least_travel_cost(2, 5).unwrap();
    verdict(
        mismatches == 0 && pivot == 6.0,
        format!("20 maps, {pairs} pairs, {mismatches} mismatches; pivot example = {pivot}"),
    )
}

/// 5. Worked power-law values.
fn worked_gains() -> Verdict {
    let a1 = phi(AggregationSpec::PowerLaw { alpha: 1.0 }, &[3.0, 5.0]);
    let a2 = phi(AggregationSpec::PowerLaw { alpha: 2.0 }, &[3.0, 5.0]);
    verdict(a1 == 6.5 && a2 == 5.75, format!("alpha=1 -> {a1}, alpha=2 -> {a2}"))
}

/// Desk-scale instances: a generated map and popularity-drawn queries,
/// keeping those whose candidate count falls in `n`.
fn desk_instances(seed: u64, b: f64, n: std::ops::RangeInclusive<usize>, want: usize) -> Vec<Instance> {
    let cfg = GeneratorConfig { poi_count: 80, edge_density: 0.06, feature_count: 8, seed, ..Default::default() };
    let map = PoiMap::from_document(&generate_map(&cfg).unwrap()).unwrap();
    let engine = Engine::new(map).unwrap();
    let qcfg =
        QueryGenConfig { count: 200, b, theta: 0.0, seed, min_features: 1, max_features: 3, ..Default::default() };
    let mut out = Vec::new();
    for doc in generate_queries(engine.map(), &qcfg).unwrap() {
        let query = Query::from_document(&doc, engine.map()).unwrap();
        if let Some(inst) = instance(engine.clone(), query) {
            if n.contains(&inst.cands.len()) {
                out.push(inst);
                if out.len() == want {
                    break;
                }
            }
        }
    }
    out
}

/// 6. Search-space estimate and counter ordering.
fn search_space() -> Verdict {
    let estimate = estimate_search_space(50, 8).unwrap();
    let est = estimate.to_string().parse::<f64>().unwrap();
    let rel = (est / 3.43e10 - 1.0).abs();

    let mut rng = rng(606);
    let mut order_violations = 0;
    for i in 0..200 {
        let inst = oracle_instance(&mut rng, 12, 2, 0.0..650.0, i % AGGREGATIONS.len(), 0.0, 1 + 4 * (i % 2));
        let k = inst.query.k;
        let (b, p1, p2) = (
            bf(&inst, k),
            pacer_with(&inst.cands, &inst.ctx, k, PacerOptions { audit: true, ..Default::default() }).unwrap(),
            pacer2(&inst, k),
        );
        let p_max = p1.audit.as_ref().unwrap().states.iter().map(|s| s.members.len()).max().unwrap_or(0);
        let n = inst.cands.len() as u64;
        let bound = estimate_search_space(n, (p_max as u64).clamp(2, n)).unwrap();
        let (eb, e1, e2) = (b.stats.examined_open_routes, p1.stats.examined_open_routes, p2.stats.examined_open_routes);
        if !(eb >= e1 && e1 >= e2 && BigUint::from(e1) <= bound) {
            order_violations += 1;
        }
    }

    let mut best_ratio = 0.0f64;
    let mut ns = Vec::new();
    for inst in desk_instances(61, 700.0, 35..=45, 4) {
        let e1 = pacer1(&inst, 1).stats.examined_open_routes as f64;
        let e2 = pacer2(&inst, 1).stats.examined_open_routes as f64;
        best_ratio = best_ratio.max(e1 / e2.max(1.0));
        ns.push(inst.cands.len());
    }
    verdict(
        rel <= 0.05 && order_violations == 0 && best_ratio >= 10.0,
        format!(
            "estimate(50,8) = {est:.4e} ({:.2}% from 3.43e10); ordering violations {order_violations}/200; \
             best pacer1/pacer2 reduction {best_ratio:.1}x at n = {ns:?}, b = 700",
            rel * 100.0
        ),
    )
}

/// 7. Heuristic quality.
///
/// Instances must admit routes through at least three candidates. With at
/// most two, no state holding several open routes is ever extended, so the
/// single-route variant does exactly the same work as pacer1.
fn heuristic_quality() -> Verdict {
    let mut rng = rng(707);
    let (mut sc_total, mut opt_total) = (0.0, 0.0);
    let mut greedy_over = 0;
    let mut sc_not_below = 0;
    let mut skipped = 0;
    let mut used = 0;
    let mut i = 0;
    while used < 200 {
        let inst = oracle_instance(&mut rng, 12, 6, 250.0..650.0, i % AGGREGATIONS.len(), 0.0, 1);
        i += 1;
        let p1 = pacer_with(&inst.cands, &inst.ctx, 1, PacerOptions { audit: true, ..Default::default() }).unwrap();
        let p_max = p1.audit.as_ref().unwrap().states.iter().map(|s| s.members.len()).max().unwrap_or(0);
        if p_max < 3 {
            skipped += 1;
            continue;
        }
        used += 1;
        let optimum = bf(&inst, 1).topk.entries()[0].gain;
        let sc = pacer_sc(&inst.cands, &inst.ctx, 1, NO_LIMITS).unwrap();
        let gr = greedy(&inst.cands, &inst.ctx, NO_LIMITS).unwrap();
        sc_total += sc.topk.entries()[0].gain;
        opt_total += optimum;
        if gr.topk.entries()[0].gain > optimum + 1e-9 {
            greedy_over += 1;
        }
        if sc.stats.examined_open_routes >= p1.stats.examined_open_routes {
            sc_not_below += 1;
        }
    }
    let ratio = sc_total / opt_total;
    verdict(
        ratio >= 0.9 && greedy_over == 0 && sc_not_below == 0,
        format!(
            "mean pacer-sc / optimal = {ratio:.4}; greedy above optimal {greedy_over}/200; \
             pacer-sc examined not below pacer1 {sc_not_below}/200 ({skipped} draws with under 3 stops skipped)"
        ),
    )
}

fn timed(f: impl Fn() -> SearchOutcome) -> (Duration, SearchOutcome) {
    let mut best = None;
    let mut out = None;
    for _ in 0..3 {
        let start = Instant::now();
        let o = f();
        let t = start.elapsed();
        best = Some(best.map_or(t, |b: Duration| b.min(t)));
        out = Some(o);
    }
    (best.unwrap(), out.unwrap())
}

/// 8. k = 100 costs at most twice k = 1; top-k' is a prefix of top-k.
fn k_behavior() -> Verdict {
    let instances = desk_instances(81, 500.0, 35..=45, 5);
    let (mut t1, mut t100) = (Duration::ZERO, Duration::ZERO);
    let mut prefix_failures = 0;
    for inst in &instances {
        let (a, one) = timed(|| pacer2(inst, 1));
        let (b, hundred) = timed(|| pacer2(inst, 100));
        t1 += a;
        t100 += b;
        for (k, small) in [(1, one), (10, pacer2(inst, 10))] {
            let prefix = &hundred.topk.entries()[..k.min(hundred.topk.len())];
            let exact = small.topk.entries().len() == prefix.len()
                && small
                    .topk
                    .entries()
                    .iter()
                    .zip(prefix)
                    .all(|(s, p)| s.members == p.members && s.gain == p.gain && s.cost == p.cost);
            if !exact {
                prefix_failures += 1;
            }
        }
    }
    let ratio = t100.as_secs_f64() / t1.as_secs_f64();
    verdict(
        ratio <= 2.0 && prefix_failures == 0 && !instances.is_empty(),
        format!(
            "{} instances: k=1 {:.1} ms, k=100 {:.1} ms (ratio {ratio:.2}); prefix failures {prefix_failures}",
            instances.len(),
            t1.as_secs_f64() * 1e3,
            t100.as_secs_f64() * 1e3
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Check); 8] = [
        ("1 oracle exactness", oracle_exactness),
        ("2 bound admissibility", bound_admissibility),
        ("3 submodularity", submodularity),
        ("4 index correctness", index_correctness),
        ("5 worked gain values", worked_gains),
        ("6 search-space accounting", search_space),
        ("7 heuristic quality", heuristic_quality),
        ("8 k behavior", k_behavior),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let v = run();
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toproute_core::generate::{generate_map, GeneratorConfig};
use toproute_core::search::TopKEntry;
use toproute_core::{AggregationDoc, CandidateSet, Engine, GainContext, PoiMap, Query, QueryDocument};

pub const AGGREGATIONS: [(&str, Option<f64>); 6] = [
    ("power_law", Some(0.0)),
    ("power_law", Some(0.5)),
    ("power_law", Some(1.0)),
    ("power_law", Some(2.0)),
    ("log", None),
    ("coverage", None),
];

pub struct Instance {
    pub engine: Engine,
    pub query: Query,
    pub cands: CandidateSet,
    pub ctx: GainContext,
}

pub fn small_map(rng: &mut ChaCha8Rng, pois: usize) -> PoiMap {
    let cfg = GeneratorConfig {
        poi_count: pois,
        edge_density: rng.random_range(0.15..0.5),
        feature_count: rng.random_range(2..=4),
        seed: rng.random(),
        directed: rng.random_bool(0.25),
        ..Default::default()
    };
    PoiMap::from_document(&generate_map(&cfg).unwrap()).unwrap()
}

/// A random feasible query; `slack` is added to the direct route cost.
pub fn random_query(
    rng: &mut ChaCha8Rng,
    engine: &Engine,
    slack: f64,
    aggregation: usize,
    theta: f64,
    k: usize,
) -> Option<Query> {
    let map = engine.map();
    let n = map.len();
    let xi = rng.random_range(0..n);
    let yi = if rng.random_bool(0.1) { xi } else { (xi + rng.random_range(1..n)) % n };
    let mut weights = BTreeMap::new();
    let features = map.features();
    let m = rng.random_range(1..=features.len().min(3));
    for _ in 0..m {
        let f = &features[rng.random_range(0..features.len())];
        weights.insert(f.clone(), rng.random_range(0.1..1.0));
    }
    normalize(&mut weights);
    let (kind, alpha) = AGGREGATIONS[aggregation];
    let direct = {
        let d = toproute_core::index::shortest_costs_from(map, xi)[yi];
        if xi == yi {
            0.0
        } else {
            d + map.poi(yi).stay
        }
    };
    let doc = QueryDocument {
        x: map.poi(xi).id,
        y: map.poi(yi).id,
        b: (direct + slack).round(),
        weights,
        theta,
        aggregation: AggregationDoc { kind: kind.into(), alpha },
        k,
        count_endpoint_stay: rng.random_bool(0.2),
    };
    let doc = if doc.count_endpoint_stay { QueryDocument { b: doc.b + map.poi(xi).stay, ..doc } } else { doc };
    Query::from_document(&doc, map).ok()
}

pub fn instance(engine: Engine, query: Query) -> Option<Instance> {
    let cands = engine.prepare(&query).ok()?;
    let ctx = cands.gain_context();
    Some(Instance { engine, query, cands, ctx })
}

/// (members, gain, cost) triples for comparisons.
pub fn summary(entries: &[TopKEntry]) -> Vec<(Vec<u32>, f64, f64)> {
    entries.iter().map(|e| (e.members.clone(), e.gain, e.cost)).collect()
}

pub fn same_results(a: &[TopKEntry], b: &[TopKEntry], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.members == y.members && (x.gain - y.gain).abs() <= tol && (x.cost - y.cost).abs() <= tol)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normalize(weights: &mut BTreeMap<String, f64>) {
    let total: f64 = weights.values().sum();
    for w in weights.values_mut() {
        *w /= total;
    }
}

/// Random instance with at most `max_n` candidates, retrying seeds from `rng`.
/// Returns the instance and the slack used.
pub fn oracle_instance(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    min_n: usize,
    slack: std::ops::Range<f64>,
    aggregation: usize,
    theta: f64,
    k: usize,
) -> Instance {
    loop {
        let pois = rng.random_range((min_n + 2).max(3)..=max_n + 2);
        let map = small_map(rng, pois);
        let engine = Engine::new(map).unwrap();
        let s = rng.random_range(slack.clone());
        let Some(query) = random_query(rng, &engine, s, aggregation, theta, k) else {
            continue;
        };
        if let Some(inst) = instance(engine, query) {
            if (min_n..=max_n).contains(&inst.cands.len()) {
                return inst;
            }
        }
    }
}

/// Best closed gain reachable from an open route through `members`
/// (candidate rows) ending at `end` with cost `cost`, by trying every
/// extension. `None` when the route cannot be closed.
pub fn best_completion(inst: &Instance, members: &mut Vec<usize>, end: usize, cost: f64) -> Option<f64> {
    let c = &inst.cands;
    let y = c.target_row();
    let closed = cost + c.dist(end, y) + c.closing_stay();
    let mut best = if closed <= c.budget + 1e-9 {
        Some(inst.ctx.gain(members.iter().copied().chain([c.source_row(), y])))
    } else {
        None
    };
    for j in 0..c.len() {
        if members.contains(&j) {
            continue;
        }
        let next = cost + c.dist(end, j) + c.stays[j];
        if next + c.dist(j, y) + c.closing_stay() > c.budget + 1e-9 {
            continue;
        }
        members.push(j);
        if let Some(g) = best_completion(inst, members, j, next) {
            best = Some(best.map_or(g, |b: f64| b.max(g)));
        }
        members.pop();
    }
    best
}

/// A random closable open route: (members in visit order, cost).
pub fn random_open_route(rng: &mut ChaCha8Rng, inst: &Instance) -> (Vec<usize>, f64) {
    let c = &inst.cands;
    let y = c.target_row();
    let mut seq = Vec::new();
    let mut end = c.source_row();
    let mut cost = c.stays[end];
    let target_len = rng.random_range(0..=c.len());
    while seq.len() < target_len {
        let options: Vec<usize> = (0..c.len())
            .filter(|j| !seq.contains(j))
            .filter(|&j| cost + c.dist(end, j) + c.stays[j] + c.dist(j, y) + c.closing_stay() <= c.budget + 1e-9)
            .collect();
        if options.is_empty() {
            break;
        }
        let j = options[rng.random_range(0..options.len())];
        cost += c.dist(end, j) + c.stays[j];
        end = j;
        seq.push(j);
    }
    (seq, cost)
}

//! Seeded synthetic maps, check-in based ratings and query batches.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::AggregationDoc;
use crate::index::shortest_costs_from;
use crate::model::{Edge, MapDocument, PoiId, PoiMap, PoiRecord};
use crate::query::QueryDocument;

const FEATURE_NAMES: &[&str] = &[
    "museum",
    "park",
    "food",
    "shopping",
    "nightlife",
    "gallery",
    "theatre",
    "cafe",
    "market",
    "garden",
    "beach",
    "temple",
    "zoo",
    "library",
    "stadium",
    "harbour",
    "castle",
    "bridge",
    "viewpoint",
    "aquarium",
];

fn feature_name(i: usize) -> String {
    match FEATURE_NAMES.get(i) {
        Some(name) => name.to_string(),
        None => format!("feature{i}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub poi_count: usize,
    /// Probability of an edge between any two POIs.
    pub edge_density: f64,
    pub feature_count: usize,
    pub stay_mean: f64,
    pub stay_stddev: f64,
    pub beta: f64,
    pub seed: u64,
    pub directed: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            poi_count: 100,
            edge_density: 0.05,
            feature_count: 8,
            stay_mean: 90.0,
            stay_stddev: 15.0,
            beta: 5.0,
            seed: 0,
            directed: false,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.poi_count == 0 {
            return Err(Error::input("poi_count must be positive"));
        }
        if !(0.0..=1.0).contains(&self.edge_density) {
            return Err(Error::input("edge_density must be in [0, 1]"));
        }
        if self.feature_count == 0 {
            return Err(Error::input("feature_count must be positive"));
        }
        if !(self.stay_mean.is_finite() && self.stay_stddev.is_finite() && self.stay_stddev >= 0.0) {
            return Err(Error::input("stay distribution parameters must be finite, stddev >= 0"));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::input("beta must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckinRow {
    pub poi: PoiId,
    pub feature: String,
    pub count: u64,
}

/// Check-in counts per (POI, feature). A POI belongs to a feature's
/// category when it has a row for it, even with a zero count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckinTable {
    pub rows: Vec<CheckinRow>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckinRatings {
    pub ratings: BTreeMap<PoiId, BTreeMap<String, f64>>,
    /// Features whose counts were all zero.
    pub dropped: Vec<String>,
}

/// Turns check-in counts into ratings: a POI's count over its category's
/// mean count, times `beta / 2`, capped at `beta`. Zero counts get no rating.
/// Repeated rows for one (POI, feature) pair are summed.
pub fn ratings_from_checkins(table: &CheckinTable, beta: f64) -> Result<CheckinRatings> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::input("beta must be positive"));
    }
    let mut by_feature: BTreeMap<&str, BTreeMap<PoiId, u64>> = BTreeMap::new();
    for row in &table.rows {
        *by_feature.entry(&row.feature).or_default().entry(row.poi).or_default() += row.count;
    }
    let mut out = CheckinRatings::default();
    for (feature, counts) in by_feature {
        let total: u64 = counts.values().sum();
        if total == 0 {
            out.dropped.push(feature.to_string());
            continue;
        }
        let mean = total as f64 / counts.len() as f64;
        for (&poi, &count) in counts.iter().filter(|(_, &c)| c > 0) {
            let rating = (count as f64 / mean * beta / 2.0).min(beta);
            out.ratings.entry(poi).or_default().insert(feature.to_string(), rating);
        }
    }
    Ok(out)
}

/// Generates a connected map. The same config always yields the same map.
///
/// Each feature gets a log-normal popularity and each POI joins one to four
/// feature categories. Check-in counts are drawn log-normally around the
/// category's popularity and converted with [`ratings_from_checkins`], so the
/// rating distribution has the shape real check-in data produces. Edge costs
/// are integers in `[5, 30]`; components are joined by extra edges. Directed
/// maps also get a cycle through all POIs so every POI reaches every other.
pub fn generate_map(cfg: &GeneratorConfig) -> Result<MapDocument> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.poi_count;
    let ids: Vec<PoiId> = (1..=n as PoiId).collect();
    let features: Vec<String> = (0..cfg.feature_count).map(feature_name).collect();

    let stay_dist = Normal::new(cfg.stay_mean, cfg.stay_stddev).map_err(|e| Error::input(e.to_string()))?;
    let stays: Vec<f64> = (0..n).map(|_| stay_dist.sample(&mut rng).round().max(1.0)).collect();
    let coords: Vec<(f64, f64)> =
        (0..n).map(|_| (40.70 + rng.random_range(0.0..0.1), -74.02 + rng.random_range(0.0..0.1))).collect();

    // Log of each feature's typical check-in count.
    let popularity = Normal::new(3.0, 1.0).expect("valid parameters");
    let feature_mu: Vec<f64> = features.iter().map(|_| popularity.sample(&mut rng)).collect();
    let mut table = CheckinTable::default();
    for &id in &ids {
        let m = rng.random_range(1..=4usize.min(features.len()));
        let mut chosen: Vec<usize> = (0..features.len()).collect();
        chosen.shuffle(&mut rng);
        for &f in &chosen[..m] {
            let count = LogNormal::new(feature_mu[f], 1.0).expect("valid parameters").sample(&mut rng).round() as u64;
            table.rows.push(CheckinRow { poi: id, feature: features[f].clone(), count });
        }
    }
    let ratings = ratings_from_checkins(&table, cfg.beta)?.ratings;

    let edges = generate_edges(&mut rng, n, cfg.edge_density, cfg.directed);
    let pois = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| PoiRecord {
            id,
            lat: Some(coords[i].0),
            lon: Some(coords[i].1),
            stay: stays[i],
            ratings: ratings.get(&id).cloned().unwrap_or_default(),
        })
        .collect();
    Ok(MapDocument { directed: cfg.directed, beta: cfg.beta, features, pois, edges })
}

fn edge_cost(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(5..=30u32) as f64
}

fn generate_edges(rng: &mut ChaCha8Rng, n: usize, density: f64, directed: bool) -> Vec<Edge> {
    let id = |i: usize| i as PoiId + 1;
    let mut edges = Vec::new();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for a in 0..n {
        let targets = if directed { 0..n } else { a + 1..n };
        for b in targets {
            if a != b && rng.random_bool(density) {
                edges.push(Edge { from: id(a), to: id(b), cost: edge_cost(rng) });
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut roots: Vec<usize> = (0..n).filter(|&v| find(&mut parent, v) == v).collect();
    roots.shuffle(rng);
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        members.entry(find(&mut parent, v)).or_default().push(v);
    }
    for pair in roots.windows(2) {
        let a = *members[&pair[0]].choose(rng).expect("non-empty");
        let b = *members[&pair[1]].choose(rng).expect("non-empty");
        edges.push(Edge { from: id(a), to: id(b), cost: edge_cost(rng) });
        if directed {
            edges.push(Edge { from: id(b), to: id(a), cost: edge_cost(rng) });
        }
    }
    if directed && n > 1 {
        let mut cycle: Vec<usize> = (0..n).collect();
        cycle.shuffle(rng);
        for i in 0..n {
            let (a, b) = (cycle[i], cycle[(i + 1) % n]);
            edges.push(Edge { from: id(a), to: id(b), cost: edge_cost(rng) });
        }
    }
    edges
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QueryGenConfig {
    pub count: usize,
    pub b: f64,
    pub theta: f64,
    pub aggregation: AggregationDoc,
    pub k: usize,
    pub seed: u64,
    pub min_features: usize,
    pub max_features: usize,
    /// Fixed endpoints; random distinct pairs when absent.
    pub x: Option<PoiId>,
    pub y: Option<PoiId>,
}

impl Default for QueryGenConfig {
    fn default() -> Self {
        QueryGenConfig {
            count: 50,
            b: 360.0,
            theta: 2.5,
            aggregation: AggregationDoc::default(),
            k: 1,
            seed: 0,
            min_features: 1,
            max_features: 4,
            x: None,
            y: None,
        }
    }
}

/// Sum of each feature's ratings, the popularity used to pick features.
pub fn feature_popularity(map: &PoiMap) -> Vec<f64> {
    let mut pop = vec![0.0; map.features().len()];
    for poi in map.pois() {
        for &(f, r) in &poi.ratings {
            pop[f] += r;
        }
    }
    pop
}

/// Draws query batches: `m` features per query, uniform in
/// `[min_features, max_features]`, picked without replacement with
/// probability proportional to popularity, weighted by popularity and
/// normalised to sum 1. Random endpoints are re-drawn (up to 100 times)
/// until the direct route fits the budget.
pub fn generate_queries(map: &PoiMap, cfg: &QueryGenConfig) -> Result<Vec<QueryDocument>> {
    if cfg.min_features == 0 || cfg.min_features > cfg.max_features {
        return Err(Error::input("need 1 <= min_features <= max_features"));
    }
    if map.len() < 2 && (cfg.x.is_none() || cfg.y.is_none()) {
        return Err(Error::input("random endpoints need at least two POIs"));
    }
    for id in [cfg.x, cfg.y].into_iter().flatten() {
        map.require(id)?;
    }
    let popularity = feature_popularity(map);
    let rated = popularity.iter().filter(|&&p| p > 0.0).count();
    if rated == 0 {
        return Err(Error::input("map has no rated features"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        let m = rng.random_range(cfg.min_features..=cfg.max_features).min(rated);
        let mut pool: Vec<(usize, f64)> = popularity.iter().copied().enumerate().filter(|&(_, p)| p > 0.0).collect();
        let mut chosen = Vec::with_capacity(m);
        for _ in 0..m {
            let total: f64 = pool.iter().map(|p| p.1).sum();
            let mut pick = rng.random::<f64>() * total;
            let mut idx = pool.len() - 1;
            for (i, &(_, p)) in pool.iter().enumerate() {
                if pick < p {
                    idx = i;
                    break;
                }
                pick -= p;
            }
            chosen.push(pool.remove(idx));
        }
        let total: f64 = chosen.iter().map(|c| c.1).sum();
        let weights = chosen.iter().map(|&(f, p)| (map.features()[f].clone(), p / total)).collect();
        let (x, y) = endpoints(map, cfg, &mut rng);
        out.push(QueryDocument {
            x,
            y,
            b: cfg.b,
            weights,
            theta: cfg.theta,
            aggregation: cfg.aggregation.clone(),
            k: cfg.k,
            count_endpoint_stay: false,
        });
    }
    Ok(out)
}

fn endpoints(map: &PoiMap, cfg: &QueryGenConfig, rng: &mut ChaCha8Rng) -> (PoiId, PoiId) {
    let n = map.len();
    let mut last = (0, 0);
    for _ in 0..100 {
        let xi = match cfg.x {
            Some(id) => map.index_of(id).expect("checked"),
            None => rng.random_range(0..n),
        };
        let yi = match cfg.y {
            Some(id) => map.index_of(id).expect("checked"),
            None => loop {
                let y = rng.random_range(0..n);
                if y != xi || n < 2 {
                    break y;
                }
            },
        };
        last = (map.poi(xi).id, map.poi(yi).id);
        if cfg.x.is_some() && cfg.y.is_some() {
            break;
        }
        if shortest_costs_from(map, xi)[yi] <= cfg.b {
            break;
        }
    }
    last
}

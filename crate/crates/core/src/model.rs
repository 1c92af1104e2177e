//! POI maps, routes and route cost.
//!
//! A [`PoiMap`] is immutable once built. It is only constructed from a
//! [`MapDocument`] that passes [`validate_map`], so every algorithm downstream
//! can assume a connected graph with positive edge costs and in-range ratings.
//! Algorithms address POIs by their dense position in [`PoiMap::pois`]; the
//! user-facing integer ids appear only at the edges of the API.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User-facing POI identifier.
pub type PoiId = u32;

/// Position of a feature in [`PoiMap::features`].
pub type FeatureId = usize;

/// Absolute tolerance for cost comparisons.
pub const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Poi {
    pub id: PoiId,
    /// (latitude, longitude) in degrees. Display metadata only.
    pub location: Option<(f64, f64)>,
    pub stay: f64,
    /// Sparse ratings sorted by feature id. Absent features rate 0.
    pub ratings: Vec<(FeatureId, f64)>,
}

impl Poi {
    pub fn rating(&self, feature: FeatureId) -> f64 {
        self.ratings.binary_search_by_key(&feature, |&(f, _)| f).map(|pos| self.ratings[pos].1).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: PoiId,
    pub to: PoiId,
    pub cost: f64,
}

/// A sequence of distinct POIs starting at the query source. A closed route
/// also ends at the destination, which may equal the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub pois: Vec<PoiId>,
    pub cost: f64,
    pub open: bool,
}

impl Route {
    pub fn closed(pois: Vec<PoiId>, cost: f64) -> Self {
        Route { pois, cost, open: false }
    }

    pub fn open(pois: Vec<PoiId>, cost: f64) -> Self {
        Route { pois, cost, open: true }
    }
}

/// Anything that answers least-travel-cost queries between dense POI indices.
pub trait DistanceOracle {
    /// `None` when `to` cannot be reached from `from`.
    fn travel_cost(&self, from: usize, to: usize) -> Option<f64>;
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiRecord {
    pub id: PoiId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
    pub stay: f64,
    #[serde(default)]
    pub ratings: BTreeMap<String, f64>,
}

/// The JSON interchange form of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDocument {
    pub directed: bool,
    pub beta: f64,
    pub features: Vec<String>,
    pub pois: Vec<PoiRecord>,
    pub edges: Vec<Edge>,
}

impl MapDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    InvalidBeta(f64),
    DuplicateFeature(String),
    DuplicatePoiId(PoiId),
    InvalidStay { poi: PoiId, stay: f64 },
    InvalidLocation(PoiId),
    UnknownFeature { poi: PoiId, feature: String },
    RatingOutOfRange { poi: PoiId, feature: String, rating: f64 },
    UnknownEndpoint { from: PoiId, to: PoiId },
    SelfLoop(PoiId),
    NonPositiveCost { from: PoiId, to: PoiId, cost: f64 },
    Empty,
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidBeta(b) => write!(f, "beta must be positive and finite, got {b}"),
            Violation::DuplicateFeature(name) => write!(f, "duplicate feature \"{name}\""),
            Violation::DuplicatePoiId(id) => write!(f, "duplicate POI id {id}"),
            Violation::InvalidStay { poi, stay } => {
                write!(f, "POI {poi}: stay cost must be finite and nonnegative, got {stay}")
            }
            Violation::InvalidLocation(poi) => write!(f, "POI {poi}: location must give both lat and lon"),
            Violation::UnknownFeature { poi, feature } => {
                write!(f, "POI {poi}: unknown feature \"{feature}\"")
            }
            Violation::RatingOutOfRange { poi, feature, rating } => {
                write!(f, "POI {poi}: rating out of range for \"{feature}\": {rating}")
            }
            Violation::UnknownEndpoint { from, to } => {
                write!(f, "edge {from}->{to} references an unknown POI")
            }
            Violation::SelfLoop(id) => write!(f, "self-loop edge on POI {id}"),
            Violation::NonPositiveCost { from, to, cost } => {
                write!(f, "edge {from}->{to}: cost must be positive and finite, got {cost}")
            }
            Violation::Empty => write!(f, "map has no POIs"),
            Violation::Disconnected { components } => {
                write!(f, "map is disconnected ({components} components)")
            }
        }
    }
}

/// Every invariant violation found in a map. Empty iff the map is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a map document against every map invariant.
///
/// Directed maps must be weakly connected; pairs that are not mutually
/// reachable are simply treated as unreachable by the search.
pub fn validate_map(doc: &MapDocument) -> ValidationReport {
    let mut violations = Vec::new();

    let beta_ok = doc.beta.is_finite() && doc.beta > 0.0;
    if !beta_ok {
        violations.push(Violation::InvalidBeta(doc.beta));
    }
    let mut feature_names = HashSet::new();
    for name in &doc.features {
        if !feature_names.insert(name.as_str()) {
            violations.push(Violation::DuplicateFeature(name.clone()));
        }
    }

    let mut index: HashMap<PoiId, usize> = HashMap::with_capacity(doc.pois.len());
    for (pos, poi) in doc.pois.iter().enumerate() {
        if index.insert(poi.id, pos).is_some() {
            violations.push(Violation::DuplicatePoiId(poi.id));
        }
        if !(poi.stay.is_finite() && poi.stay >= 0.0) {
            violations.push(Violation::InvalidStay { poi: poi.id, stay: poi.stay });
        }
        if poi.lat.is_some() != poi.lon.is_some() {
            violations.push(Violation::InvalidLocation(poi.id));
        }
        for (feature, &rating) in &poi.ratings {
            if !feature_names.contains(feature.as_str()) {
                violations.push(Violation::UnknownFeature { poi: poi.id, feature: feature.clone() });
            } else if !(rating.is_finite() && rating >= 0.0 && (!beta_ok || rating <= doc.beta)) {
                violations.push(Violation::RatingOutOfRange { poi: poi.id, feature: feature.clone(), rating });
            }
        }
    }

    let mut adjacency = vec![Vec::new(); doc.pois.len()];
    for edge in &doc.edges {
        let (Some(&a), Some(&b)) = (index.get(&edge.from), index.get(&edge.to)) else {
            violations.push(Violation::UnknownEndpoint { from: edge.from, to: edge.to });
            continue;
        };
        if a == b {
            violations.push(Violation::SelfLoop(edge.from));
            continue;
        }
        if !(edge.cost.is_finite() && edge.cost > 0.0) {
            violations.push(Violation::NonPositiveCost { from: edge.from, to: edge.to, cost: edge.cost });
        }
        adjacency[a].push(b);
        adjacency[b].push(a);
    }

    if doc.pois.is_empty() {
        violations.push(Violation::Empty);
    } else {
        let components = count_components(&adjacency);
        if components > 1 {
            violations.push(Violation::Disconnected { components });
        }
    }

    ValidationReport { violations }
}

fn count_components(adjacency: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adjacency.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..adjacency.len() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    components
}

// ---------------------------------------------------------------------------
// The validated map

#[derive(Debug, Clone)]
pub struct PoiMap {
    directed: bool,
    beta: f64,
    features: Vec<String>,
    pois: Vec<Poi>,
    edges: Vec<Edge>,
    index: HashMap<PoiId, usize>,
    out_adj: Vec<Vec<(usize, f64)>>,
    in_adj: Vec<Vec<(usize, f64)>>,
}

impl PoiMap {
    /// Builds a map from its document form, rejecting any invalid input.
    pub fn from_document(doc: &MapDocument) -> Result<Self> {
        let report = validate_map(doc);
        if !report.is_valid() {
            return Err(Error::InvalidMap(report));
        }
        let feature_pos: HashMap<&str, FeatureId> =
            doc.features.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
        let pois = doc
            .pois
            .iter()
            .map(|rec| {
                let mut ratings: Vec<(FeatureId, f64)> = rec
                    .ratings
                    .iter()
                    .filter(|(_, &r)| r > 0.0)
                    .map(|(name, &r)| (feature_pos[name.as_str()], r))
                    .collect();
                ratings.sort_by_key(|&(f, _)| f);
                Poi { id: rec.id, location: rec.lat.zip(rec.lon), stay: rec.stay, ratings }
            })
            .collect();
        Ok(Self::assemble(doc.directed, doc.beta, doc.features.clone(), pois, doc.edges.clone()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&MapDocument::from_json(text)?)
    }

    /// Builds a map from parts, validating it through the document form.
    pub fn new(directed: bool, beta: f64, features: Vec<String>, pois: Vec<Poi>, edges: Vec<Edge>) -> Result<Self> {
        let doc = Self::assemble(directed, beta, features, pois, edges).to_document();
        Self::from_document(&doc)
    }

    fn assemble(directed: bool, beta: f64, features: Vec<String>, pois: Vec<Poi>, edges: Vec<Edge>) -> Self {
        let index: HashMap<PoiId, usize> = pois.iter().enumerate().map(|(i, p)| (p.id, i)).collect();
        let mut out_adj = vec![Vec::new(); pois.len()];
        let mut in_adj = vec![Vec::new(); pois.len()];
        for e in &edges {
            let (a, b) = (index[&e.from], index[&e.to]);
            out_adj[a].push((b, e.cost));
            in_adj[b].push((a, e.cost));
            if !directed {
                out_adj[b].push((a, e.cost));
                in_adj[a].push((b, e.cost));
            }
        }
        PoiMap { directed, beta, features, pois, edges, index, out_adj, in_adj }
    }

    pub fn to_document(&self) -> MapDocument {
        MapDocument {
            directed: self.directed,
            beta: self.beta,
            features: self.features.clone(),
            pois: self
                .pois
                .iter()
                .map(|p| PoiRecord {
                    id: p.id,
                    lat: p.location.map(|l| l.0),
                    lon: p.location.map(|l| l.1),
                    stay: p.stay,
                    ratings: p.ratings.iter().map(|&(f, r)| (self.features[f].clone(), r)).collect(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        self.to_document().to_json()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_id(&self, name: &str) -> Option<FeatureId> {
        self.features.iter().position(|f| f == name)
    }

    pub fn pois(&self) -> &[Poi] {
        &self.pois
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.pois.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pois.is_empty()
    }

    pub fn index_of(&self, id: PoiId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn require(&self, id: PoiId) -> Result<usize> {
        self.index_of(id).ok_or(Error::UnknownPoi(id))
    }

    pub fn poi(&self, idx: usize) -> &Poi {
        &self.pois[idx]
    }

    /// Outgoing (neighbor, cost) pairs. For undirected maps this is every incident edge.
    pub fn out_edges(&self, idx: usize) -> &[(usize, f64)] {
        &self.out_adj[idx]
    }

    pub fn in_edges(&self, idx: usize) -> &[(usize, f64)] {
        &self.in_adj[idx]
    }

    pub fn min_out_edge(&self, idx: usize) -> Option<f64> {
        self.out_adj[idx].iter().map(|&(_, c)| c).min_by(f64::total_cmp)
    }

    pub fn min_in_edge(&self, idx: usize) -> Option<f64> {
        self.in_adj[idx].iter().map(|&(_, c)| c).min_by(f64::total_cmp)
    }

    pub fn degree(&self, idx: usize) -> usize {
        if self.directed {
            self.out_adj[idx].len() + self.in_adj[idx].len()
        } else {
            self.out_adj[idx].len()
        }
    }
}

/// Cost of a route: the stay cost of every POI on it plus the least travel
/// cost of every leg. A closed route whose source equals its destination
/// pays that POI's stay once.
pub fn route_cost(map: &PoiMap, route: &Route, dist: &impl DistanceOracle) -> Result<f64> {
    let idx = route.pois.iter().map(|&id| map.require(id)).collect::<Result<Vec<_>>>()?;
    let mut seen = HashSet::with_capacity(idx.len());
    let mut cost = 0.0;
    for (pos, &i) in idx.iter().enumerate() {
        let is_closing_return = pos + 1 == idx.len() && pos > 0 && i == idx[0] && !route.open;
        if !seen.insert(i) && !is_closing_return {
            return Err(Error::InfeasibleRoute(format!("POI {} is visited twice", map.poi(i).id)));
        }
        if pos > 0 {
            let prev = idx[pos - 1];
            cost +=
                dist.travel_cost(prev, i).ok_or(Error::Unreachable { from: map.poi(prev).id, to: map.poi(i).id })?;
        }
        if !is_closing_return {
            cost += map.poi(i).stay;
        }
    }
    Ok(cost)
}

//! Queries and per-query sub-index retrieval.
//!
//! [`retrieve_subindices`] shrinks the map to the candidate POIs a query can
//! actually use: POIs rated at least `theta` (and above zero) on a preferred
//! feature, that also fit on a detour `x -> i -> y` within the budget. The
//! resulting [`CandidateSet`] carries everything the solvers need in local
//! coordinates: candidates take rows `0..n` in ascending id order, the
//! source takes row `n` and the destination row `n + 1` (or `n` again when
//! source and destination coincide).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::{AggregationDoc, AggregationSpec, GainContext};
use crate::index::{FeatureIndex, FeatureList, HopIndex, Label, LabelQuery};
use crate::model::{FeatureId, PoiId, PoiMap, COST_EPS};

/// Tolerance on the weight vector summing to one.
pub const WEIGHT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub source: PoiId,
    pub target: PoiId,
    pub budget: f64,
    /// Preferred features and their weights; weights sum to one.
    pub weights: Vec<(FeatureId, f64)>,
    /// Ratings below this are treated as zero, on every feature.
    pub theta: f64,
    pub aggregation: AggregationSpec,
    pub k: usize,
    /// When false the source and destination cost nothing to stay at and
    /// contribute nothing to the gain.
    pub count_endpoint_stay: bool,
}

fn default_k() -> usize {
    1
}

/// JSON form of a query. Batch files hold an array of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryDocument {
    pub x: PoiId,
    pub y: PoiId,
    pub b: f64,
    pub weights: BTreeMap<String, f64>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub aggregation: AggregationDoc,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub count_endpoint_stay: bool,
}

impl Query {
    pub fn validate(&self) -> Result<()> {
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return Err(Error::input(format!("budget must be positive, got {}", self.budget)));
        }
        if self.k == 0 {
            return Err(Error::input("k must be at least 1"));
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(Error::input(format!("theta must be finite and >= 0, got {}", self.theta)));
        }
        if let Some(&(f, w)) = self.weights.iter().find(|(_, w)| !(0.0..=1.0).contains(w)) {
            return Err(Error::input(format!("weight of feature {f} outside [0, 1]: {w}")));
        }
        let total: f64 = self.weights.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > WEIGHT_EPS {
            return Err(Error::input(format!("weights must sum to 1, got {total}")));
        }
        self.aggregation.validate()
    }

    pub fn from_document(doc: &QueryDocument, map: &PoiMap) -> Result<Self> {
        let weights = doc
            .weights
            .iter()
            .map(|(name, &w)| {
                map.feature_id(name)
                    .map(|f| (f, w))
                    .ok_or_else(|| Error::input(format!("unknown feature \"{name}\" in weights")))
            })
            .collect::<Result<Vec<_>>>()?;
        let query = Query {
            source: doc.x,
            target: doc.y,
            budget: doc.b,
            weights,
            theta: doc.theta,
            aggregation: AggregationSpec::from_doc(&doc.aggregation)?,
            k: doc.k,
            count_endpoint_stay: doc.count_endpoint_stay,
        };
        query.validate()?;
        Ok(query)
    }

    pub fn to_document(&self, map: &PoiMap) -> QueryDocument {
        QueryDocument {
            x: self.source,
            y: self.target,
            b: self.budget,
            weights: self.weights.iter().map(|&(f, w)| (map.features()[f].clone(), w)).collect(),
            theta: self.theta,
            aggregation: self.aggregation.to_doc(),
            k: self.k,
            count_endpoint_stay: self.count_endpoint_stay,
        }
    }
}

/// Parses either one query object or an array of them.
pub fn parse_queries(text: &str) -> Result<Vec<QueryDocument>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        Ok(serde_json::from_value(value)?)
    } else {
        Ok(vec![serde_json::from_value(value)?])
    }
}

/// Label lists of one POI after cutting every label costlier than the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SubLabels {
    pub out: Vec<Label>,
    pub inward: Vec<Label>,
}

/// The per-query POI universe.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    /// Candidate ids, ascending. Excludes the source and destination.
    pub pois: Vec<PoiId>,
    pub source: PoiId,
    pub target: PoiId,
    pub budget: f64,
    pub aggregation: AggregationSpec,
    pub beta: f64,
    /// Preferred features (positive weight), ascending.
    pub features: Vec<FeatureId>,
    pub weights: Vec<f64>,
    /// Filtered ratings per local row and preferred feature.
    pub filtered_ratings: Vec<Vec<f64>>,
    /// Per preferred feature, the feature-index entries rated at least theta.
    pub fi_q: Vec<FeatureList>,
    /// Budget-cut label lists per local row.
    pub hi_q: Vec<SubLabels>,
    /// Stay cost per local row; zero at the endpoints unless counted.
    pub stays: Vec<f64>,
    /// Cheapest in- and out-edge of each local row in the full map.
    pub min_in: Vec<f64>,
    pub min_out: Vec<f64>,
    dist: Vec<f64>,
    rows: usize,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.pois.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pois.is_empty()
    }

    pub fn source_row(&self) -> usize {
        self.pois.len()
    }

    pub fn target_row(&self) -> usize {
        if self.source == self.target {
            self.pois.len()
        } else {
            self.pois.len() + 1
        }
    }

    pub fn has_distinct_target(&self) -> bool {
        self.source != self.target
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    /// POI id of a local row.
    pub fn id_of(&self, row: usize) -> PoiId {
        match row {
            r if r < self.pois.len() => self.pois[r],
            r if r == self.pois.len() => self.source,
            _ => self.target,
        }
    }

    /// Local row of a candidate POI.
    pub fn row_of(&self, id: PoiId) -> Option<usize> {
        self.pois.binary_search(&id).ok()
    }

    /// Least travel cost between two local rows (infinite if unknown
    /// within the budget cut).
    #[inline]
    pub fn dist(&self, from: usize, to: usize) -> f64 {
        self.dist[from * self.rows + to]
    }

    /// Stay cost added when the route closes at the destination; zero when
    /// the destination is the source, which was paid for at the start.
    pub fn closing_stay(&self) -> f64 {
        if self.has_distinct_target() {
            self.stays[self.target_row()]
        } else {
            0.0
        }
    }

    /// Cost of the route `x -> y` with no candidates.
    pub fn direct_cost(&self) -> f64 {
        let (x, y) = (self.source_row(), self.target_row());
        self.stays[x] + self.dist(x, y) + self.closing_stay()
    }

    pub fn gain_context(&self) -> GainContext {
        let scale = match self.aggregation {
            AggregationSpec::Coverage => 1.0 / self.beta,
            _ => 1.0,
        };
        let rows = self.filtered_ratings.iter().map(|row| row.iter().map(|r| r * scale).collect()).collect();
        GainContext::new(self.aggregation, self.weights.clone(), rows)
    }
}

/// Extracts the query's candidate set and sub-indices.
pub fn retrieve_subindices(map: &PoiMap, fi: &FeatureIndex, hi: &HopIndex, query: &Query) -> Result<CandidateSet> {
    query.validate()?;
    if !hi.matches(map) {
        return Err(Error::input("hop index was built for a different map"));
    }
    if fi.lists.len() != map.features().len() {
        return Err(Error::input("feature index was built for a different map"));
    }
    if map.len() < 2 {
        return Err(Error::input("map has fewer than two POIs; nothing to search"));
    }
    let x = map.require(query.source)?;
    let y = map.require(query.target)?;
    let b = query.budget;
    let stay_of = |idx: usize| {
        if (idx == x || idx == y) && !query.count_endpoint_stay {
            0.0
        } else {
            map.poi(idx).stay
        }
    };
    let y_closing = if x == y { 0.0 } else { stay_of(y) };

    let direct = stay_of(x) + hi.travel_cost_counted(x, y).0.unwrap_or(f64::INFINITY) + y_closing;
    if direct > b + COST_EPS {
        return Err(Error::InfeasibleQuery { direct_cost: direct, budget: b });
    }

    let mut preferred: Vec<(FeatureId, f64)> = query.weights.iter().copied().filter(|&(_, w)| w > 0.0).collect();
    preferred.sort_by_key(|&(f, _)| f);

    let fi_q: Vec<FeatureList> = preferred
        .iter()
        .map(|&(f, _)| {
            let list = fi.list(f);
            FeatureList { feature: list.feature.clone(), entries: list.at_least(query.theta).to_vec() }
        })
        .collect();

    let mut by_feature: BTreeSet<PoiId> = BTreeSet::new();
    for list in &fi_q {
        by_feature.extend(list.entries.iter().map(|&(id, _)| id));
    }

    let mut candidates = Vec::new();
    for id in by_feature {
        let i = map.require(id)?;
        if i == x || i == y {
            continue;
        }
        let to_i = hi.travel_cost_counted(x, i).0;
        let from_i = hi.travel_cost_counted(i, y).0;
        let (Some(to_i), Some(from_i)) = (to_i, from_i) else {
            continue;
        };
        if stay_of(x) + to_i + stay_of(i) + from_i + y_closing <= b + COST_EPS {
            candidates.push((id, i));
        }
    }

    let n = candidates.len();
    let rows = n + 2;
    let mut map_rows: Vec<usize> = candidates.iter().map(|&(_, i)| i).collect();
    map_rows.push(x);
    map_rows.push(y);

    let filter = |idx: usize, f: FeatureId| {
        let r = map.poi(idx).rating(f);
        if r > 0.0 && r >= query.theta {
            r
        } else {
            0.0
        }
    };
    let filtered_ratings: Vec<Vec<f64>> = map_rows
        .iter()
        .enumerate()
        .map(|(row, &idx)| {
            let endpoint = row >= n;
            preferred
                .iter()
                .map(|&(f, _)| if endpoint && !query.count_endpoint_stay { 0.0 } else { filter(idx, f) })
                .collect()
        })
        .collect();

    let cut = |labels: &[Label]| -> Vec<Label> { labels.iter().copied().filter(|l| l.d <= b + COST_EPS).collect() };
    let hi_q: Vec<SubLabels> = map_rows
        .iter()
        .map(|&idx| SubLabels { out: cut(hi.out_labels(idx)), inward: cut(hi.in_labels(idx)) })
        .collect();

    let mut dist = vec![f64::INFINITY; rows * rows];
    let mut merge = LabelQuery::new(map.len());
    for a in 0..rows {
        for c in 0..rows {
            dist[a * rows + c] = if map_rows[a] == map_rows[c] {
                0.0
            } else {
                merge.query(&hi_q[a].out, &hi_q[c].inward).unwrap_or(f64::INFINITY)
            };
        }
    }

    Ok(CandidateSet {
        pois: candidates.iter().map(|&(id, _)| id).collect(),
        source: query.source,
        target: query.target,
        budget: b,
        aggregation: query.aggregation,
        beta: map.beta(),
        features: preferred.iter().map(|&(f, _)| f).collect(),
        weights: preferred.iter().map(|&(_, w)| w).collect(),
        filtered_ratings,
        fi_q,
        hi_q,
        stays: map_rows
            .iter()
            .enumerate()
            .map(|(row, &idx)| if row >= n { stay_of(idx) } else { map.poi(idx).stay })
            .collect(),
        min_in: map_rows.iter().map(|&i| map.min_in_edge(i).unwrap_or(0.0)).collect(),
        min_out: map_rows.iter().map(|&i| map.min_out_edge(i).unwrap_or(0.0)).collect(),
        dist,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_feature_index, build_hop_index};
    use crate::sample::six_poi_map;

    fn doc(x: PoiId, y: PoiId, b: f64) -> QueryDocument {
        QueryDocument {
            x,
            y,
            b,
            weights: BTreeMap::from([("museum".into(), 0.5), ("food".into(), 0.5)]),
            theta: 0.0,
            aggregation: AggregationDoc::default(),
            k: 1,
            count_endpoint_stay: false,
        }
    }

    fn prepare(d: &QueryDocument) -> Result<CandidateSet> {
        let map = PoiMap::from_document(&six_poi_map()).unwrap();
        let query = Query::from_document(d, &map)?;
        retrieve_subindices(&map, &build_feature_index(&map), &build_hop_index(&map), &query)
    }

    #[test]
    fn parses_single_object_and_array() {
        let one = r#"{"x": 1, "y": 5, "b": 10, "weights": {"park": 1}}"#;
        let parsed = parse_queries(one).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].k, 1);
        assert_eq!(parsed[0].theta, 0.0);
        assert!(!parsed[0].count_endpoint_stay);
        assert_eq!(parse_queries(&format!("[{one}, {one}]")).unwrap().len(), 2);
        assert!(parse_queries("{\"x\": 1}").is_err());
    }

    #[test]
    fn rejects_bad_weights_and_budgets() {
        let map = PoiMap::from_document(&six_poi_map()).unwrap();
        let mut d = doc(1, 5, 10.0);
        d.weights.insert("park".into(), 0.5);
        assert!(Query::from_document(&d, &map).is_err());
        let mut d = doc(1, 5, 10.0);
        d.weights.insert("nightlife".into(), 0.0);
        assert!(Query::from_document(&d, &map).is_err());
        assert!(Query::from_document(&doc(1, 5, 0.0), &map).is_err());
        assert!(Query::from_document(&QueryDocument { k: 0, ..doc(1, 5, 10.0) }, &map).is_err());
        assert!(Query::from_document(&QueryDocument { theta: -1.0, ..doc(1, 5, 10.0) }, &map).is_err());
    }

    #[test]
    fn document_round_trip() {
        let map = PoiMap::from_document(&six_poi_map()).unwrap();
        let d = QueryDocument { theta: 0.5, k: 3, count_endpoint_stay: true, ..doc(2, 4, 20.0) };
        assert_eq!(Query::from_document(&d, &map).unwrap().to_document(&map), d);
    }

    #[test]
    fn candidates_and_rows() {
        let c = prepare(&doc(1, 5, 9.0)).unwrap();
        // POI 2 needs 9 to reach and 6 to leave; POI 4 only fits at b >= 9.
        assert_eq!(c.pois, vec![3, 4]);
        assert_eq!((c.source_row(), c.target_row()), (2, 3));
        assert_eq!((c.id_of(2), c.id_of(3)), (1, 5));
        assert_eq!(c.row_of(4), Some(1));
        assert_eq!(c.row_of(1), None);
        assert_eq!(c.dist(2, 0), 4.0);
        assert_eq!(c.dist(1, 3), 4.0);
        assert_eq!(c.direct_cost(), 5.0);
        assert_eq!(c.closing_stay(), 0.0);
    }

    #[test]
    fn theta_filters_every_feature() {
        let c = prepare(&QueryDocument { theta: 0.75, ..doc(1, 5, 30.0) }).unwrap();
        assert_eq!(c.pois, vec![3]);
    }

    #[test]
    fn same_source_and_target_share_a_row() {
        let c = prepare(&doc(3, 3, 12.0)).unwrap();
        assert_eq!(c.source_row(), c.target_row());
        assert!(!c.has_distinct_target());
        assert_eq!(c.direct_cost(), 0.0);
    }

    #[test]
    fn infeasible_direct_route() {
        assert!(matches!(prepare(&doc(2, 5, 5.0)), Err(Error::InfeasibleQuery { .. })));
    }
}

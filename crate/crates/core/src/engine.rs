use crate::error::{Error, Result};
use crate::index::{build_feature_index, build_hop_index, FeatureIndex, HopIndex};
use crate::model::PoiMap;
use crate::query::{retrieve_subindices, CandidateSet, Query, QueryDocument};
use crate::search::{run_algorithm, Algorithm, QueryResult, SearchLimits, SearchOutcome};

/// A map together with its feature and hop indices.
#[derive(Debug, Clone)]
pub struct Engine {
    map: PoiMap,
    features: FeatureIndex,
    hops: HopIndex,
}

impl Engine {
    /// Builds both indices for `map`.
    pub fn new(map: PoiMap) -> Result<Self> {
        let features = build_feature_index(&map);
        let hops = build_hop_index(&map);
        Ok(Engine { map, features, hops })
    }

    /// Uses prebuilt indices, which must belong to `map`.
    pub fn with_indices(map: PoiMap, features: FeatureIndex, hops: HopIndex) -> Result<Self> {
        if !hops.matches(&map) {
            return Err(Error::Format("hop index was built for a different map".into()));
        }
        Ok(Engine { map, features, hops })
    }

    pub fn map(&self) -> &PoiMap {
        &self.map
    }

    pub fn feature_index(&self) -> &FeatureIndex {
        &self.features
    }

    pub fn hop_index(&self) -> &HopIndex {
        &self.hops
    }

    pub fn prepare(&self, query: &Query) -> Result<CandidateSet> {
        retrieve_subindices(&self.map, &self.features, &self.hops, query)
    }

    pub fn run(&self, query: &Query, algorithm: Algorithm, limits: SearchLimits) -> Result<SearchOutcome> {
        let cands = self.prepare(query)?;
        let ctx = cands.gain_context();
        run_algorithm(algorithm, &cands, &ctx, query.k, limits)
    }

    pub fn solve(&self, doc: &QueryDocument, algorithm: Algorithm, limits: SearchLimits) -> Result<QueryResult> {
        let query = Query::from_document(doc, &self.map)?;
        let outcome = self.run(&query, algorithm, limits)?;
        Ok(QueryResult::new(algorithm, &outcome))
    }
}

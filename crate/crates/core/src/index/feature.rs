use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{FeatureId, PoiId, PoiMap};

/// POIs with a nonzero rating on one feature, best rated first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureList {
    pub feature: String,
    pub entries: Vec<(PoiId, f64)>,
}

impl FeatureList {
    /// Leading entries with rating at least `threshold`.
    pub fn at_least(&self, threshold: f64) -> &[(PoiId, f64)] {
        let cut = self.entries.partition_point(|&(_, r)| r >= threshold);
        &self.entries[..cut]
    }
}

/// Inverted index from feature to rated POIs. Lists are indexed by
/// [`FeatureId`] and sorted by rating descending, ties by ascending id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureIndex {
    pub lists: Vec<FeatureList>,
}

impl FeatureIndex {
    pub fn list(&self, feature: FeatureId) -> &FeatureList {
        &self.lists[feature]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn build_feature_index(map: &PoiMap) -> FeatureIndex {
    let mut lists: Vec<FeatureList> =
        map.features().iter().map(|name| FeatureList { feature: name.clone(), entries: Vec::new() }).collect();
    for poi in map.pois() {
        for &(f, r) in &poi.ratings {
            if r > 0.0 {
                lists[f].entries.push((poi.id, r));
            }
        }
    }
    for list in &mut lists {
        list.entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    }
    FeatureIndex { lists }
}

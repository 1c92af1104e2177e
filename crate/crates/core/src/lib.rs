//! Top-k personalized route search over a map of points of interest.
//!
//! A [`PoiMap`] holds POIs with stay costs and per-feature ratings, joined by
//! weighted edges. Queries ask for the `k` routes from `x` to `y` within a
//! cost budget that maximise a weighted, diminishing-returns gain over the
//! features the user cares about.
//!
//! ```
//! use toproute_core::{sample, Algorithm, Engine, PoiMap, QueryDocument};
//!
//! let map = PoiMap::from_document(&sample::six_poi_map()).unwrap();
//! let engine = Engine::new(map).unwrap();
//! let doc: QueryDocument = serde_json::from_str(
//!     r#"{"x": 1, "y": 5, "b": 20, "weights": {"museum": 1.0}, "k": 2}"#,
//! ).unwrap();
//! let result = engine.solve(&doc, Algorithm::Pacer2, Default::default()).unwrap();
//! assert!(!result.routes.is_empty());
//! ```

pub mod bench;
pub mod error;
pub mod gain;
pub mod generate;
pub mod index;
pub mod model;
pub mod query;
pub mod sample;
pub mod search;

mod engine;

pub use engine::Engine;
pub use error::{Error, Result};
pub use gain::{AggregationDoc, AggregationSpec, GainContext, SetProfile};
pub use index::{build_feature_index, build_hop_index, FeatureIndex, HopIndex};
pub use model::{route_cost, MapDocument, Poi, PoiId, PoiMap, Route, ValidationReport};
pub use query::{parse_queries, retrieve_subindices, CandidateSet, Query, QueryDocument};
pub use search::{Algorithm, QueryResult, SearchLimits, SearchOutcome, SearchStats};

//! Offline indices: the inverted feature index and the 2-hop label index,
//! plus a plain Dijkstra used to validate them.

mod dijkstra;
mod feature;
mod hop;

pub use dijkstra::{dijkstra_cost, shortest_costs_from, DijkstraOracle};
pub use feature::{build_feature_index, FeatureIndex, FeatureList};
pub use hop::{build_hop_index, HopIndex, Label, LabelQuery, INDEX_MAGIC};

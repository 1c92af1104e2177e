//! A small hand-built map used in docs, tests and the demo page.

use std::collections::BTreeMap;

use crate::model::{Edge, MapDocument, PoiRecord};

/// Six POIs rated on park, museum and food, connected by a sparse road
/// network. Costs are in minutes.
pub fn six_poi_map() -> MapDocument {
    let poi = |id, lat, lon, stay, ratings: &[(&str, f64)]| PoiRecord {
        id,
        lat: Some(lat),
        lon: Some(lon),
        stay,
        ratings: ratings.iter().map(|&(f, r)| (f.to_string(), r)).collect::<BTreeMap<_, _>>(),
    };
    let edge = |from, to, cost| Edge { from, to, cost };
    MapDocument {
        directed: false,
        beta: 1.0,
        features: vec!["park".into(), "museum".into(), "food".into()],
        pois: vec![
            poi(1, 0.030, 0.010, 2.0, &[("park", 0.9), ("food", 0.3)]),
            poi(2, 0.020, 0.060, 0.0, &[("museum", 0.4)]),
            poi(3, 0.045, 0.040, 3.0, &[("museum", 0.8), ("food", 0.7)]),
            poi(4, 0.070, 0.020, 2.0, &[("park", 0.7), ("museum", 0.6)]),
            poi(5, 0.060, 0.075, 1.0, &[("food", 0.9)]),
            poi(6, 0.005, 0.030, 0.0, &[("park", 0.5)]),
        ],
        edges: vec![
            edge(1, 6, 2.0),
            edge(1, 3, 4.0),
            edge(1, 4, 3.0),
            edge(2, 3, 5.0),
            edge(2, 6, 7.0),
            edge(3, 4, 3.0),
            edge(3, 5, 1.0),
            edge(4, 5, 5.0),
        ],
    }
}

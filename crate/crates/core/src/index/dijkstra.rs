use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{DistanceOracle, PoiId, PoiMap};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Least travel cost from `source` to every POI; `f64::INFINITY` if unreachable.
pub fn shortest_costs_from(map: &PoiMap, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; map.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Dist(0.0), source)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, c) in map.out_edges(u) {
            let nd = d + c;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Dist(nd), v)));
            }
        }
    }
    dist
}

/// Shortest-path cost between two POIs using edge costs only.
pub fn dijkstra_cost(map: &PoiMap, from: PoiId, to: PoiId) -> Result<f64> {
    let (i, j) = (map.require(from)?, map.require(to)?);
    let d = shortest_costs_from(map, i)[j];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Unreachable { from, to })
    }
}

/// Answers distance queries by running Dijkstra each time.
pub struct DijkstraOracle<'a>(pub &'a PoiMap);

impl DistanceOracle for DijkstraOracle<'_> {
    fn travel_cost(&self, from: usize, to: usize) -> Option<f64> {
        let d = shortest_costs_from(self.0, from)[to];
        d.is_finite().then_some(d)
    }
}

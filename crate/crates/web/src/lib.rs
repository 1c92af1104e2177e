//! Browser bindings for the route planner.
//!
//! The page keeps one [`Planner`] per loaded map. Every call takes and
//! returns JSON text so the JavaScript side stays free of generated glue
//! types. The `*_json` functions hold the logic and run natively in tests;
//! the `#[wasm_bindgen]` items only translate errors.

use std::time::Duration;

use serde::Serialize;
use toproute_core::generate::{generate_map, GeneratorConfig};
use toproute_core::search::{Algorithm, QueryResult, SearchLimits};
use toproute_core::{Engine, Error, PoiMap, Query, QueryDocument};
use wasm_bindgen::prelude::*;

/// Keeps the page responsive when a query is too loose for exact search.
const TIME_CAP: Duration = Duration::from_secs(5);
const MEMORY_CAP: usize = 512 << 20;

fn limits() -> SearchLimits {
    SearchLimits { time: Some(TIME_CAP), memory_bytes: Some(MEMORY_CAP) }
}

fn text(e: impl ToString) -> String {
    e.to_string()
}

/// A seeded synthetic map laid out in a small box, as map JSON.
pub fn generate_map_json(seed: u64, pois: usize, density: f64) -> Result<String, String> {
    let cfg = GeneratorConfig { poi_count: pois, edge_density: density, feature_count: 4, seed, ..Default::default() };
    generate_map(&cfg).and_then(|doc| doc.to_json()).map_err(text)
}

/// One row of an algorithm comparison.
#[derive(Debug, Serialize)]
pub struct Comparison {
    pub algorithm: String,
    /// `completed`, or the reason the run stopped.
    pub status: String,
    pub gain: Option<f64>,
    pub cost: Option<f64>,
    pub pois: Option<Vec<u32>>,
    pub examined: u64,
    pub states: u64,
    pub wall_time_ms: f64,
}

#[wasm_bindgen]
pub struct Planner {
    engine: Engine,
}

impl Planner {
    pub fn from_json(map_json: &str) -> Result<Planner, String> {
        let map = PoiMap::from_json(map_json).map_err(text)?;
        Ok(Planner { engine: Engine::new(map).map_err(text)? })
    }

    fn query(&self, query_json: &str) -> Result<Query, String> {
        let doc: QueryDocument = serde_json::from_str(query_json).map_err(text)?;
        Query::from_document(&doc, self.engine.map()).map_err(text)
    }

    /// Top-k routes for one query, as result JSON.
    pub fn plan_json(&self, query_json: &str, algorithm: &str) -> Result<String, String> {
        let algorithm: Algorithm = algorithm.parse().map_err(text)?;
        let query = self.query(query_json)?;
        let outcome = self.engine.run(&query, algorithm, limits()).map_err(text)?;
        serde_json::to_string(&QueryResult::new(algorithm, &outcome)).map_err(text)
    }

    /// Runs every algorithm on one query and reports the best route and
    /// the search effort of each.
    pub fn compare_json(&self, query_json: &str) -> Result<String, String> {
        let mut query = self.query(query_json)?;
        query.k = 1;
        let cands = self.engine.prepare(&query).map_err(text)?;
        let ctx = cands.gain_context();
        let rows: Vec<Comparison> = Algorithm::ALL
            .into_iter()
            .map(|algorithm| {
                let run = toproute_core::search::run_algorithm(algorithm, &cands, &ctx, 1, limits());
                let name = algorithm.name().to_string();
                match run {
                    Ok(outcome) => {
                        let best = outcome.topk.entries().first();
                        Comparison {
                            algorithm: name,
                            status: "completed".into(),
                            gain: best.map(|e| e.gain),
                            cost: best.map(|e| e.cost),
                            pois: best.map(|e| e.route.pois.clone()),
                            examined: outcome.stats.examined_open_routes,
                            states: outcome.stats.states_created,
                            wall_time_ms: outcome.stats.wall_time.as_secs_f64() * 1e3,
                        }
                    }
                    Err(e) => Comparison {
                        algorithm: name,
                        status: match e {
                            Error::CapExceeded(what) => format!("{what} cap exceeded"),
                            Error::Refused(why) => format!("refused: {why}"),
                            other => other.to_string(),
                        },
                        gain: None,
                        cost: None,
                        pois: None,
                        examined: 0,
                        states: 0,
                        wall_time_ms: 0.0,
                    },
                }
            })
            .collect();
        serde_json::to_string(&rows).map_err(text)
    }

    /// Number of candidate POIs the query keeps after filtering.
    pub fn candidate_count(&self, query_json: &str) -> Result<usize, String> {
        let query = self.query(query_json)?;
        self.engine.prepare(&query).map(|c| c.len()).map_err(text)
    }

    pub fn map_json(&self) -> Result<String, String> {
        self.engine.map().to_json().map_err(text)
    }
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
impl Planner {
    #[wasm_bindgen(constructor)]
    pub fn new(map_json: &str) -> Result<Planner, JsError> {
        Planner::from_json(map_json).map_err(js)
    }

    /// The six-POI example map.
    pub fn sample() -> Planner {
        let map = PoiMap::from_document(&toproute_core::sample::six_poi_map()).expect("sample map is valid");
        Planner { engine: Engine::new(map).expect("sample map is searchable") }
    }

    pub fn plan(&self, query_json: &str, algorithm: &str) -> Result<String, JsError> {
        self.plan_json(query_json, algorithm).map_err(js)
    }

    pub fn compare(&self, query_json: &str) -> Result<String, JsError> {
        self.compare_json(query_json).map_err(js)
    }

    pub fn candidates(&self, query_json: &str) -> Result<usize, JsError> {
        self.candidate_count(query_json).map_err(js)
    }

    pub fn map(&self) -> Result<String, JsError> {
        self.map_json().map_err(js)
    }
}

#[wasm_bindgen(js_name = generateMap)]
pub fn generate_map_js(seed: u64, pois: usize, density: f64) -> Result<String, JsError> {
    generate_map_json(seed, pois, density).map_err(js)
}

//! Runs query batches through several solvers and aggregates the results.

use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::gain::AggregationSpec;
use crate::query::{Query, QueryDocument};
use crate::search::{Algorithm, SearchLimits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    CapExceeded,
    /// Even the direct route breaks the budget.
    Infeasible,
    /// Brute force declined an oversized candidate set.
    Refused,
}

/// One (algorithm, query) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub query: usize,
    pub b: f64,
    pub theta: f64,
    pub alpha: Option<f64>,
    pub k: usize,
    pub status: RunStatus,
    /// Gain of the best route found.
    pub gain: Option<f64>,
    pub wall_ms: f64,
    pub examined: u64,
}

/// Aggregates over the runs sharing (algorithm, b, theta, alpha, k). Gain
/// and examined means cover completed runs only; the time mean covers all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGroup {
    pub algorithm: String,
    pub b: f64,
    pub theta: f64,
    pub alpha: Option<f64>,
    pub k: usize,
    pub mean_gain: f64,
    pub mean_ms: f64,
    pub mean_examined: f64,
    pub completion_ratio: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub groups: Vec<BenchGroup>,
    pub rows: Vec<BenchRow>,
}

pub const CSV_COLUMNS: [&str; 9] =
    ["algorithm", "b", "theta", "alpha", "k", "mean_gain", "mean_ms", "mean_examined", "completion_ratio"];

impl BenchReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for g in &self.groups {
            w.write_record([
                g.algorithm.clone(),
                g.b.to_string(),
                g.theta.to_string(),
                g.alpha.map(|a| a.to_string()).unwrap_or_default(),
                g.k.to_string(),
                g.mean_gain.to_string(),
                g.mean_ms.to_string(),
                g.mean_examined.to_string(),
                g.completion_ratio.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs every algorithm on every query, one after another, each under
/// `limits`. Malformed queries abort the bench; search failures are recorded
/// per run.
pub fn run_bench(
    engine: &Engine,
    queries: &[QueryDocument],
    algorithms: &[Algorithm],
    limits: SearchLimits,
) -> Result<BenchReport> {
    let parsed: Vec<Query> = queries.iter().map(|q| Query::from_document(q, engine.map())).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(parsed.len() * algorithms.len());
    for &algorithm in algorithms {
        for (i, query) in parsed.iter().enumerate() {
            let start = Instant::now();
            let run = engine.run(query, algorithm, limits);
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let (status, gain, examined) = match run {
                Ok(outcome) => (
                    RunStatus::Completed,
                    outcome.topk.entries().first().map(|e| e.gain),
                    outcome.stats.examined_open_routes,
                ),
                Err(Error::CapExceeded(_)) => (RunStatus::CapExceeded, None, 0),
                Err(Error::InfeasibleQuery { .. }) => (RunStatus::Infeasible, None, 0),
                Err(Error::Refused(_)) => (RunStatus::Refused, None, 0),
                Err(e) => return Err(e),
            };
            rows.push(BenchRow {
                algorithm: algorithm.name().to_string(),
                query: i,
                b: query.budget,
                theta: query.theta,
                alpha: match query.aggregation {
                    AggregationSpec::PowerLaw { alpha } => Some(alpha),
                    _ => None,
                },
                k: query.k,
                status,
                gain,
                wall_ms,
                examined,
            });
        }
    }
    Ok(BenchReport { groups: aggregate(&rows), rows })
}

/// Groups rows by setting, in order of first appearance.
pub fn aggregate(rows: &[BenchRow]) -> Vec<BenchGroup> {
    type Key = (String, u64, u64, Option<u64>, usize);
    let key = |r: &BenchRow| -> Key {
        (r.algorithm.clone(), r.b.to_bits(), r.theta.to_bits(), r.alpha.map(f64::to_bits), r.k)
    };
    let mut keys: Vec<Key> = Vec::new();
    let mut members: Vec<Vec<&BenchRow>> = Vec::new();
    for row in rows {
        let k = key(row);
        match keys.iter().position(|existing| *existing == k) {
            Some(i) => members[i].push(row),
            None => {
                keys.push(k);
                members.push(vec![row]);
            }
        }
    }
    members
        .into_iter()
        .map(|group| {
            let first = group[0];
            let done: Vec<&&BenchRow> = group.iter().filter(|r| r.status == RunStatus::Completed).collect();
            let mean = |values: Vec<f64>| {
                if values.is_empty() {
                    f64::NAN
                } else {
                    values.iter().sum::<f64>() / values.len() as f64
                }
            };
            BenchGroup {
                algorithm: first.algorithm.clone(),
                b: first.b,
                theta: first.theta,
                alpha: first.alpha,
                k: first.k,
                mean_gain: mean(done.iter().map(|r| r.gain.unwrap_or(0.0)).collect()),
                mean_ms: mean(group.iter().map(|r| r.wall_ms).collect()),
                mean_examined: mean(done.iter().map(|r| r.examined as f64).collect()),
                completion_ratio: done.len() as f64 / group.len() as f64,
                runs: group.len(),
            }
        })
        .collect()
}

//! Route search over a prepared [`CandidateSet`].
//!
//! * [`pacer`]: exact top-k search over compact states (one state per POI
//!   set), with cost-dominance pruning and, optionally, marginal-gain upper
//!   bound pruning.
//! * [`pacer_sc`]: the same enumeration keeping a single cheapest open route
//!   per state. Heuristic.
//! * [`greedy`]: ratio-greedy insertion. Heuristic, one route.
//! * [`brute_force`]: breadth-first enumeration of every feasible route.
//!   The oracle the others are checked against.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::error::{Error, Result};
use crate::gain::GainContext;
use crate::model::PoiId;
use crate::query::CandidateSet;

mod bound;
mod brute;
mod estimate;
mod greedy;
mod key;
mod pacer;
mod topk;

pub use bound::completion_upper_bound;
pub use brute::{brute_force, BRUTE_FORCE_MAX_CANDIDATES};
pub use estimate::{closed_form_estimate, estimate_search_space};
pub use greedy::greedy;
pub use pacer::{pacer, pacer_sc, pacer_with, PacerOptions};
pub use topk::{update_topk, TopK, TopKEntry};

/// Slack on gain comparisons in the bound test, so rounding in the bound
/// never discards a route that ties the current k-th gain.
pub const GAIN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    pub examined_open_routes: u64,
    pub states_created: u64,
    pub pruned_by_dominance: u64,
    pub pruned_by_bound: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub examined_open_routes: u64,
    pub states_created: u64,
    pub pruned_by_dominance: u64,
    pub pruned_by_bound: u64,
    pub wall_time_ms: f64,
}

impl From<&SearchStats> for StatsDocument {
    fn from(s: &SearchStats) -> Self {
        StatsDocument {
            examined_open_routes: s.examined_open_routes,
            states_created: s.states_created,
            pruned_by_dominance: s.pruned_by_dominance,
            pruned_by_bound: s.pruned_by_bound,
            wall_time_ms: s.wall_time.as_secs_f64() * 1e3,
        }
    }
}

/// Per-query resource caps. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SearchLimits {
    pub time: Option<Duration>,
    pub memory_bytes: Option<usize>,
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }
}

/// Enforces [`SearchLimits`] during a run.
pub(crate) struct Guard {
    start: Instant,
    limits: SearchLimits,
    ticks: u32,
}

impl Guard {
    pub(crate) fn start(limits: SearchLimits) -> Result<Self> {
        let guard = Guard { start: Instant::now(), limits, ticks: 0 };
        guard.check_time()?;
        Ok(guard)
    }

    fn check_time(&self) -> Result<()> {
        match self.limits.time {
            Some(cap) if self.start.elapsed() >= cap => Err(Error::CapExceeded("time")),
            _ => Ok(()),
        }
    }

    /// Cheap periodic check; `bytes` is the caller's memory estimate.
    pub(crate) fn tick(&mut self, bytes: usize) -> Result<()> {
        if let Some(cap) = self.limits.memory_bytes {
            if bytes > cap {
                return Err(Error::CapExceeded("memory"));
            }
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(256) {
            self.check_time()?;
        }
        Ok(())
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

/// An open route discarded by the bound test, recorded when auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedRoute {
    /// Candidate POIs on the route, ascending.
    pub members: Vec<PoiId>,
    pub end: PoiId,
    pub cost: f64,
    pub gain: f64,
    pub bound: f64,
    pub threshold: f64,
}

/// A finished compact state, recorded when auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSnapshot {
    pub members: Vec<PoiId>,
    pub gain: f64,
    /// (end POI, open route cost) pairs.
    pub routes: Vec<(PoiId, f64)>,
}

/// Internals of a search run for tests and diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchAudit {
    pub pruned: Vec<PrunedRoute>,
    /// The k-th gain threshold each time it was consulted.
    pub thresholds: Vec<f64>,
    pub states: Vec<StateSnapshot>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub topk: TopK,
    pub stats: SearchStats,
    pub audit: Option<SearchAudit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    BruteForce,
    /// Exact, cost-dominance pruning only.
    Pacer1,
    /// Exact, both prunings.
    Pacer2,
    PacerSc,
    Greedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::BruteForce, Algorithm::Pacer1, Algorithm::Pacer2, Algorithm::PacerSc, Algorithm::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BruteForce => "bf",
            Algorithm::Pacer1 => "pacer1",
            Algorithm::Pacer2 => "pacer2",
            Algorithm::PacerSc => "pacer-sc",
            Algorithm::Greedy => "greedy",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::BruteForce | Algorithm::Pacer1 | Algorithm::Pacer2)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            Error::input(format!("unknown algorithm \"{s}\" (expected bf, pacer1, pacer2, pacer-sc or greedy)"))
        })
    }
}

/// Runs one solver. Brute force refuses candidate sets larger than
/// [`BRUTE_FORCE_MAX_CANDIDATES`].
pub fn run_algorithm(
    algorithm: Algorithm,
    cands: &CandidateSet,
    ctx: &GainContext,
    k: usize,
    limits: SearchLimits,
) -> Result<SearchOutcome> {
    match algorithm {
        Algorithm::BruteForce => brute_force(cands, ctx, k, limits, false),
        Algorithm::Pacer1 => pacer_with(cands, ctx, k, PacerOptions { pruning2: false, limits, ..Default::default() }),
        Algorithm::Pacer2 => pacer_with(cands, ctx, k, PacerOptions { pruning2: true, limits, ..Default::default() }),
        Algorithm::PacerSc => pacer_sc(cands, ctx, k, limits),
        Algorithm::Greedy => greedy(cands, ctx, limits),
    }
}

/// One route of a result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDocument {
    pub pois: Vec<PoiId>,
    pub cost: f64,
    pub gain: f64,
}

/// Result JSON for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub routes: Vec<RouteDocument>,
    pub stats: StatsDocument,
    pub algorithm: String,
}

impl QueryResult {
    pub fn new(algorithm: Algorithm, outcome: &SearchOutcome) -> Self {
        QueryResult {
            routes: outcome
                .topk
                .entries()
                .iter()
                .map(|e| RouteDocument { pois: e.route.pois.clone(), cost: e.cost, gain: e.gain })
                .collect(),
            stats: StatsDocument::from(&outcome.stats),
            algorithm: algorithm.name().to_string(),
        }
    }
}

/// Shared helpers for turning local rows into routes.
pub(crate) fn closed_route_ids(cands: &CandidateSet, middle: &[usize]) -> Vec<PoiId> {
    let mut ids = Vec::with_capacity(middle.len() + 2);
    ids.push(cands.source);
    ids.extend(middle.iter().map(|&r| cands.id_of(r)));
    if cands.has_distinct_target() || !middle.is_empty() {
        ids.push(cands.target);
    }
    ids
}

pub(crate) fn sorted_member_ids(cands: &CandidateSet, rows: impl IntoIterator<Item = usize>) -> Vec<PoiId> {
    let mut ids: Vec<PoiId> = rows.into_iter().map(|r| cands.id_of(r)).collect();
    ids.sort_unstable();
    ids
}

/// Gain of a closed route through `members`: the set plus both endpoints.
pub(crate) fn closed_gain(cands: &CandidateSet, ctx: &GainContext, members: &[usize]) -> f64 {
    ctx.gain(members.iter().copied().chain([cands.source_row(), cands.target_row()]))
}

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use std::mem::size_of;

use super::bound::CompletionBound;
use super::key::{StateKey, WideKey};
use super::topk::{TopK, TopKEntry};
use super::{
    closed_gain, closed_route_ids, sorted_member_ids, Guard, PrunedRoute, SearchAudit, SearchLimits, SearchOutcome,
    SearchStats, StateSnapshot, GAIN_EPS,
};
use crate::error::Result;
use crate::gain::{GainContext, SetProfile};
use crate::model::{Route, COST_EPS};
use crate::query::CandidateSet;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PacerOptions {
    /// Discard open routes whose gain upper bound cannot reach the current
    /// k-th best gain.
    pub pruning2: bool,
    /// Keep only the cheapest open route of each state. Not exact.
    pub single_route: bool,
    /// Record pruned routes, thresholds and finished states.
    pub audit: bool,
    pub limits: SearchLimits,
}

/// Exact top-k search with both prunings.
pub fn pacer(cands: &CandidateSet, ctx: &GainContext, k: usize, limits: SearchLimits) -> Result<SearchOutcome> {
    pacer_with(cands, ctx, k, PacerOptions { pruning2: true, limits, ..Default::default() })
}

/// Single-route-per-state variant, without the bound test.
pub fn pacer_sc(cands: &CandidateSet, ctx: &GainContext, k: usize, limits: SearchLimits) -> Result<SearchOutcome> {
    pacer_with(cands, ctx, k, PacerOptions { single_route: true, limits, ..Default::default() })
}

pub fn pacer_with(cands: &CandidateSet, ctx: &GainContext, k: usize, options: PacerOptions) -> Result<SearchOutcome> {
    if cands.len() <= 128 {
        Search::<u128>::new(cands, ctx, k, options)?.run()
    } else {
        Search::<WideKey>::new(cands, ctx, k, options)?.run()
    }
}

const NO_PRED: u32 = u32::MAX;

/// Open route summarised by its last POI, its cost and the POI before it.
#[derive(Debug, Clone, Copy)]
struct OpenRoute {
    end: u32,
    pred: u32,
    cost: f64,
}

struct Search<'a, K> {
    cands: &'a CandidateSet,
    ctx: &'a GainContext,
    options: PacerOptions,
    guard: Guard,
    x: usize,
    y: usize,
    closing: f64,
    topk: TopK,
    stats: SearchStats,
    audit: Option<SearchAudit>,
    states: FxHashMap<K, Vec<OpenRoute>>,
    bytes: usize,
}

impl<'a, K: StateKey> Search<'a, K> {
    fn new(cands: &'a CandidateSet, ctx: &'a GainContext, k: usize, options: PacerOptions) -> Result<Self> {
        let guard = Guard::start(options.limits)?;
        let y = cands.target_row();
        let closing = cands.closing_stay();
        Ok(Search {
            cands,
            ctx,
            options,
            guard,
            x: cands.source_row(),
            y,
            closing,
            topk: TopK::new(k),
            stats: SearchStats::default(),
            audit: options.audit.then(SearchAudit::default),
            states: FxHashMap::default(),
            bytes: 0,
        })
    }

    /// Cheapest way to close a route ending at `end` with cost `cost`.
    fn closed_cost(&self, end: usize, cost: f64) -> f64 {
        cost + self.cands.dist(end, self.y) + self.closing
    }

    fn fits(&self, closed_cost: f64) -> bool {
        closed_cost <= self.cands.budget + COST_EPS
    }

    /// Whether a route ending at `end` with cost `cost` can still visit `j`
    /// and reach the destination.
    fn can_extend(&self, end: usize, cost: f64, j: usize) -> bool {
        self.fits(cost + self.cands.dist(end, j) + self.cands.stays[j] + self.cands.dist(j, self.y) + self.closing)
    }

    fn run(mut self) -> Result<SearchOutcome> {
        let n = self.cands.len();
        let root = K::empty(n);
        let root_route = OpenRoute { end: self.x as u32, pred: NO_PRED, cost: self.cands.stays[self.x] };

        let direct = self.closed_cost(self.x, root_route.cost);
        if self.fits(direct) {
            let gain = closed_gain(self.cands, self.ctx, &[]);
            self.offer(&root, root_route, &[], gain, direct);
        }

        let mut pending = BTreeSet::new();
        self.push_children(&root, &[root_route], &mut pending);
        let root_gain = self.ctx.gain([self.x]);
        self.finish_state(root, vec![root_route], root_gain);

        while let Some(key) = pending.pop_first() {
            self.guard.tick(self.bytes + pending.len() * (size_of::<K>() + key.heap_bytes()))?;
            self.expand(key, &mut pending);
        }

        self.stats.wall_time = self.guard.elapsed();
        Ok(SearchOutcome { topk: self.topk, stats: self.stats, audit: self.audit })
    }

    fn expand(&mut self, key: K, pending: &mut BTreeSet<K>) {
        let members = key.rows();
        let profile = self.ctx.profile(members.iter().copied().chain([self.x]));
        let open_gain = profile.value(self.ctx);
        let mut bound: Option<CompletionBound> = None;
        let mut routes = Vec::new();

        for &j in &members {
            let Some(pred_routes) = self.states.get(&key.without(j)) else {
                continue;
            };
            let mut best: Option<OpenRoute> = None;
            for r in pred_routes {
                let cost = r.cost + self.cands.dist(r.end as usize, j) + self.cands.stays[j];
                if best.is_none_or(|b| cost < b.cost) {
                    best = Some(OpenRoute { end: j as u32, pred: r.end, cost });
                }
            }
            self.stats.examined_open_routes += pred_routes.len() as u64;
            self.stats.pruned_by_dominance += pred_routes.len().saturating_sub(1) as u64;
            let Some(route) = best else { continue };
            if !self.fits(self.closed_cost(j, route.cost)) {
                continue;
            }
            if self.options.pruning2 && self.bound_prunes(&key, &members, &profile, open_gain, route, &mut bound) {
                continue;
            }
            routes.push(route);
        }

        if self.options.single_route && routes.len() > 1 {
            let cheapest = routes.iter().copied().reduce(|a, b| if b.cost < a.cost { b } else { a });
            routes = cheapest.into_iter().collect();
        }
        if routes.is_empty() {
            return;
        }

        let (best, closed) = routes
            .iter()
            .map(|&r| (r, self.closed_cost(r.end as usize, r.cost)))
            .reduce(|a, b| if b.1 < a.1 { b } else { a })
            .expect("non-empty");
        let gain = closed_gain(self.cands, self.ctx, &members);
        self.offer(&key, best, &members, gain, closed);

        self.push_children(&key, &routes, pending);
        self.finish_state(key, routes, open_gain);
    }

    fn bound_prunes(
        &mut self,
        key: &K,
        members: &[usize],
        profile: &SetProfile,
        open_gain: f64,
        route: OpenRoute,
        bound: &mut Option<CompletionBound>,
    ) -> bool {
        let threshold = self.topk.threshold();
        if let Some(audit) = self.audit.as_mut() {
            audit.thresholds.push(threshold);
        }
        if threshold == f64::NEG_INFINITY {
            return false;
        }
        let data =
            bound.get_or_insert_with(|| CompletionBound::new(self.cands, self.ctx, profile, |i| key.contains(i)));
        let up = data.upper_bound(self.cands, route.end as usize, route.cost);
        if open_gain + up + GAIN_EPS >= threshold {
            return false;
        }
        self.stats.pruned_by_bound += 1;
        if let Some(audit) = self.audit.as_mut() {
            audit.pruned.push(PrunedRoute {
                members: sorted_member_ids(self.cands, members.iter().copied()),
                end: self.cands.id_of(route.end as usize),
                cost: route.cost,
                gain: open_gain,
                bound: up,
                threshold,
            });
        }
        true
    }

    fn push_children(&self, key: &K, routes: &[OpenRoute], pending: &mut BTreeSet<K>) {
        for j in (0..self.cands.len()).filter(|&j| !key.contains(j)) {
            if routes.iter().any(|r| self.can_extend(r.end as usize, r.cost, j)) {
                pending.insert(key.with(j));
            }
        }
    }

    fn finish_state(&mut self, key: K, routes: Vec<OpenRoute>, open_gain: f64) {
        self.stats.states_created += 1;
        if let Some(audit) = self.audit.as_mut() {
            audit.states.push(StateSnapshot {
                members: sorted_member_ids(self.cands, key.rows()),
                gain: open_gain,
                routes: routes.iter().map(|r| (self.cands.id_of(r.end as usize), r.cost)).collect(),
            });
        }
        self.bytes += size_of::<K>() + key.heap_bytes() + routes.len() * size_of::<OpenRoute>() + 32;
        self.states.insert(key, routes);
    }

    fn offer(&mut self, key: &K, last: OpenRoute, members: &[usize], gain: f64, cost: f64) {
        if !self.topk.may_accept(gain, cost) {
            return;
        }
        let middle = self.backtrack(key, last);
        let entry = TopKEntry {
            members: sorted_member_ids(self.cands, members.iter().copied()),
            route: Route::closed(closed_route_ids(self.cands, &middle), cost),
            gain,
            cost,
        };
        self.topk.insert(entry);
    }

    /// Candidate rows of the open route ending with `last`, in visit order.
    fn backtrack(&self, key: &K, last: OpenRoute) -> Vec<usize> {
        if last.pred == NO_PRED {
            return Vec::new();
        }
        let mut seq = vec![last.end as usize];
        let mut state = key.without(last.end as usize);
        let mut pred = last.pred;
        while pred as usize != self.x {
            let r = self.states[&state].iter().find(|r| r.end == pred).expect("predecessor route is stored");
            seq.push(r.end as usize);
            state = state.without(r.end as usize);
            pred = r.pred;
        }
        seq.reverse();
        seq
    }
}

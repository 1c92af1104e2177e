use std::mem::size_of;

use super::topk::{TopK, TopKEntry};
use super::{closed_gain, closed_route_ids, sorted_member_ids, Guard, SearchLimits, SearchOutcome, SearchStats};
use crate::error::{Error, Result};
use crate::gain::GainContext;
use crate::model::{Route, COST_EPS};
use crate::query::CandidateSet;

/// Largest candidate set brute force accepts unless forced.
pub const BRUTE_FORCE_MAX_CANDIDATES: usize = 15;

struct Partial {
    seq: Vec<u16>,
    mask: u128,
    cost: f64,
}

/// Enumerates every feasible route level by level. `force` lifts the
/// candidate limit up to 128.
pub fn brute_force(
    cands: &CandidateSet,
    ctx: &GainContext,
    k: usize,
    limits: SearchLimits,
    force: bool,
) -> Result<SearchOutcome> {
    let n = cands.len();
    if n > BRUTE_FORCE_MAX_CANDIDATES && !force {
        return Err(Error::Refused(format!("brute force over {n} candidates (limit {BRUTE_FORCE_MAX_CANDIDATES})")));
    }
    if n > 128 {
        return Err(Error::Refused(format!("brute force over {n} candidates (hard limit 128)")));
    }
    let mut guard = Guard::start(limits)?;
    let (x, y) = (cands.source_row(), cands.target_row());
    let closing = cands.closing_stay();
    let mut topk = TopK::new(k);
    let mut stats = SearchStats::default();

    let start = cands.stays[x];
    let direct = start + cands.dist(x, y) + closing;
    if direct <= cands.budget + COST_EPS {
        let entry = TopKEntry {
            members: Vec::new(),
            route: Route::closed(closed_route_ids(cands, &[]), direct),
            gain: closed_gain(cands, ctx, &[]),
            cost: direct,
        };
        topk.insert(entry);
    }

    let mut level = vec![Partial { seq: Vec::new(), mask: 0, cost: start }];
    let mut bytes = 0usize;
    while !level.is_empty() {
        let mut next = Vec::new();
        for route in &level {
            let end = route.seq.last().map_or(x, |&r| r as usize);
            for j in (0..n).filter(|&j| route.mask >> j & 1 == 0) {
                stats.examined_open_routes += 1;
                let cost = route.cost + cands.dist(end, j) + cands.stays[j];
                let closed = cost + cands.dist(j, y) + closing;
                if closed > cands.budget + COST_EPS {
                    continue;
                }
                let mut seq = route.seq.clone();
                seq.push(j as u16);
                let middle: Vec<usize> = seq.iter().map(|&r| r as usize).collect();
                let gain = closed_gain(cands, ctx, &middle);
                if topk.may_accept(gain, closed) {
                    topk.insert(TopKEntry {
                        members: sorted_member_ids(cands, middle.iter().copied()),
                        route: Route::closed(closed_route_ids(cands, &middle), closed),
                        gain,
                        cost: closed,
                    });
                }
                bytes += size_of::<Partial>() + seq.len() * 2;
                guard.tick(bytes)?;
                stats.states_created += 1;
                next.push(Partial { seq, mask: route.mask | 1 << j, cost });
            }
        }
        let freed: usize = level.iter().map(|p| size_of::<Partial>() + p.seq.len() * 2).sum();
        bytes = bytes.saturating_sub(freed);
        level = next;
    }

    stats.wall_time = guard.elapsed();
    Ok(SearchOutcome { topk, stats, audit: None })
}

use super::topk::{TopK, TopKEntry};
use super::{closed_gain, closed_route_ids, sorted_member_ids, Guard, SearchLimits, SearchOutcome, SearchStats};
use crate::error::Result;
use crate::gain::GainContext;
use crate::model::{Route, COST_EPS};
use crate::query::CandidateSet;

/// Repeatedly inserts the candidate with the best marginal gain per unit of
/// cost at its cheapest position, while the route stays within budget.
///
/// The cost in the ratio is the candidate's stay plus its travel from the
/// source and to the destination. Candidates adding no gain are never
/// inserted. Returns a single route.
pub fn greedy(cands: &CandidateSet, ctx: &GainContext, limits: SearchLimits) -> Result<SearchOutcome> {
    let mut guard = Guard::start(limits)?;
    let n = cands.len();
    let (x, y) = (cands.source_row(), cands.target_row());
    let mut stats = SearchStats::default();

    // Rows of the closed route; for x == y the last row is x again.
    let mut route = vec![x, y];
    let mut in_route = vec![false; n];
    let mut cost = cands.direct_cost();
    let mut profile = ctx.profile([x, y]);

    loop {
        guard.tick(0)?;
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for i in (0..n).filter(|&i| !in_route[i]) {
            stats.examined_open_routes += 1;
            let delta = profile.marginal(ctx, i);
            if delta <= 0.0 {
                continue;
            }
            let (pos, added) = (1..route.len())
                .map(|p| {
                    let (a, b) = (route[p - 1], route[p]);
                    (p, cands.dist(a, i) + cands.stays[i] + cands.dist(i, b) - cands.dist(a, b))
                })
                .reduce(|a, b| if b.1 < a.1 { b } else { a })
                .expect("route has a leg");
            if cost + added > cands.budget + COST_EPS {
                continue;
            }
            let ratio = delta / (cands.stays[i] + cands.dist(x, i) + cands.dist(i, y));
            if best.is_none_or(|b| ratio > b.0) {
                best = Some((ratio, i, pos, added));
            }
        }
        let Some((_, i, pos, _)) = best else { break };
        route.insert(pos, i);
        in_route[i] = true;
        profile.insert(ctx, i);
        stats.states_created += 1;
        cost = route_cost(cands, &route);
    }

    let middle: Vec<usize> = route[1..route.len() - 1].to_vec();
    let mut topk = TopK::new(1);
    topk.insert(TopKEntry {
        members: sorted_member_ids(cands, middle.iter().copied()),
        route: Route::closed(closed_route_ids(cands, &middle), cost),
        gain: closed_gain(cands, ctx, &middle),
        cost,
    });
    stats.wall_time = guard.elapsed();
    Ok(SearchOutcome { topk, stats, audit: None })
}

/// Left fold of stays and legs along a closed route of local rows.
fn route_cost(cands: &CandidateSet, route: &[usize]) -> f64 {
    let last = route.len() - 1;
    route.windows(2).enumerate().fold(cands.stays[route[0]], |cost, (leg, w)| {
        let stay = if leg + 1 == last { cands.closing_stay() } else { cands.stays[w[1]] };
        cost + cands.dist(w[0], w[1]) + stay
    })
}

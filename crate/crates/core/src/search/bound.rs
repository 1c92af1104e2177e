use crate::gain::{fractional_fill, sort_by_ratio, BoundItem, GainContext, SetProfile};
use crate::model::COST_EPS;
use crate::query::CandidateSet;

/// Per-state data for the completion bound: each unvisited candidate's
/// marginal gain against the state and its relaxed cost, in ratio order.
pub(crate) struct CompletionBound {
    items: Vec<BoundItem>,
    delta_y: f64,
}

impl CompletionBound {
    pub(crate) fn new(
        cands: &CandidateSet,
        ctx: &GainContext,
        profile: &SetProfile,
        visited: impl Fn(usize) -> bool,
    ) -> Self {
        let mut items: Vec<BoundItem> = (0..cands.len())
            .filter(|&i| !visited(i))
            .map(|i| BoundItem {
                key: i,
                delta: profile.marginal(ctx, i),
                cost: cands.stays[i] + cands.min_in[i] / 2.0 + cands.min_out[i] / 2.0,
            })
            .filter(|item| item.delta > 0.0)
            .collect();
        sort_by_ratio(&mut items);
        let delta_y = if cands.has_distinct_target() { profile.marginal(ctx, cands.target_row()) } else { 0.0 };
        CompletionBound { items, delta_y }
    }

    /// Upper bound on the gain any closed completion adds to an open route
    /// ending at row `end` with cost `cost`.
    ///
    /// Only candidates that fit between `end` and the destination on their
    /// own take part. The destination is always visited, so its marginal
    /// gain is counted and its relaxed cost (closing stay plus half its
    /// cheapest in-edge) is reserved before the ratio sweep, as is half of
    /// the cheapest edge leaving `end`.
    pub(crate) fn upper_bound(&self, cands: &CandidateSet, end: usize, cost: f64) -> f64 {
        let y = cands.target_row();
        let closing = cands.closing_stay();
        let remaining = cands.budget - cost;
        let knapsack = remaining - cands.min_out[end] / 2.0 - closing - cands.min_in[y] / 2.0;
        if knapsack < 0.0 {
            return self.delta_y;
        }
        let reachable = self.items.iter().copied().filter(|item| {
            let i = item.key;
            cands.dist(end, i) + cands.stays[i] + cands.dist(i, y) + closing <= remaining + COST_EPS
        });
        self.delta_y + fractional_fill(reachable, knapsack)
    }
}

/// The bound the exact search applies to an open route through the
/// candidate rows `members` that ends at row `end` (a member, or the source
/// row for the empty route) with cost `cost`.
pub fn completion_upper_bound(
    cands: &CandidateSet,
    ctx: &GainContext,
    members: &[usize],
    end: usize,
    cost: f64,
) -> f64 {
    let profile = ctx.profile(members.iter().copied().chain([cands.source_row()]));
    CompletionBound::new(cands, ctx, &profile, |i| members.contains(&i)).upper_bound(cands, end, cost)
}

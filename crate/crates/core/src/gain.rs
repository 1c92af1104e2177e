//! Submodular route gain.
//!
//! The gain of a POI set is a weighted sum, over the query's preferred
//! features, of an aggregation of the set's (filtered) ratings on that
//! feature. All three aggregations are nonnegative, monotone and submodular,
//! so the gain is too. Gains depend only on the set, never on visit order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PoiMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AggregationSpec {
    /// Rank-discounted sum: the r-th best rating is scaled by `r^-alpha`.
    /// `alpha = 0` is a plain sum; large `alpha` approaches the max.
    PowerLaw { alpha: f64 },
    /// `ln(1 + sum of ratings)`.
    LogUtility,
    /// `1 - prod(1 - r)` over ratings rescaled into `[0, 1]`.
    Coverage,
}

/// Power-law exponent used when a query does not give one.
pub const DEFAULT_ALPHA: f64 = 0.5;

impl Default for AggregationSpec {
    fn default() -> Self {
        AggregationSpec::PowerLaw { alpha: DEFAULT_ALPHA }
    }
}

/// `{"type": "power_law" | "log" | "coverage", "alpha": number}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationDoc {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Default for AggregationDoc {
    fn default() -> Self {
        AggregationSpec::default().to_doc()
    }
}

impl AggregationSpec {
    pub fn from_doc(doc: &AggregationDoc) -> Result<Self> {
        let spec = match doc.kind.as_str() {
            "power_law" => AggregationSpec::PowerLaw { alpha: doc.alpha.unwrap_or(DEFAULT_ALPHA) },
            "log" | "log_utility" => AggregationSpec::LogUtility,
            "coverage" => AggregationSpec::Coverage,
            other => return Err(Error::input(format!("unknown aggregation type \"{other}\""))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_doc(&self) -> AggregationDoc {
        match *self {
            AggregationSpec::PowerLaw { alpha } => AggregationDoc { kind: "power_law".into(), alpha: Some(alpha) },
            AggregationSpec::LogUtility => AggregationDoc { kind: "log".into(), alpha: None },
            AggregationSpec::Coverage => AggregationDoc { kind: "coverage".into(), alpha: None },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AggregationSpec::PowerLaw { alpha } if !(alpha.is_finite() && alpha >= 0.0) => {
                Err(Error::input(format!("power-law alpha must be finite and >= 0, got {alpha}")))
            }
            _ => Ok(()),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            AggregationSpec::PowerLaw { alpha } => Some(alpha),
            _ => None,
        }
    }
}

/// Aggregates one feature's ratings. Coverage expects ratings already
/// rescaled into `[0, 1]`.
pub fn phi(spec: AggregationSpec, ratings: &[f64]) -> f64 {
    let mut sorted = ratings.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let rank_weights = match spec {
        AggregationSpec::PowerLaw { alpha } => power_weights(alpha, sorted.len() + 1),
        _ => Vec::new(),
    };
    phi_sorted(spec, &rank_weights, &sorted)
}

fn power_weights(alpha: f64, len: usize) -> Vec<f64> {
    (1..=len).map(|r| (r as f64).powf(-alpha)).collect()
}

// `sorted` is descending.
fn phi_sorted(spec: AggregationSpec, rank_weights: &[f64], sorted: &[f64]) -> f64 {
    match spec {
        AggregationSpec::PowerLaw { .. } => sorted.iter().zip(rank_weights).map(|(r, w)| r * w).sum(),
        AggregationSpec::LogUtility => (1.0 + sorted.iter().sum::<f64>()).ln(),
        AggregationSpec::Coverage => 1.0 - sorted.iter().map(|r| 1.0 - r).product::<f64>(),
    }
}

/// Query-specific gain model over a small universe of rows.
///
/// Rows are the local positions used by the search (candidates followed by
/// the endpoints). Each row holds the filtered rating on every preferred
/// feature, already divided by beta when the aggregation is coverage.
#[derive(Debug, Clone)]
pub struct GainContext {
    spec: AggregationSpec,
    weights: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rank_weights: Vec<f64>,
}

impl GainContext {
    pub fn new(spec: AggregationSpec, weights: Vec<f64>, rows: Vec<Vec<f64>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == weights.len()));
        let rank_weights = match spec {
            AggregationSpec::PowerLaw { alpha } => power_weights(alpha, rows.len() + 1),
            _ => Vec::new(),
        };
        GainContext { spec, weights, rows, rank_weights }
    }

    pub fn spec(&self) -> AggregationSpec {
        self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.rows[row]
    }

    pub fn empty_profile(&self) -> SetProfile {
        SetProfile { sorted: vec![Vec::new(); self.weights.len()] }
    }

    /// Sorted per-feature ratings of a set. Duplicate rows count once.
    pub fn profile(&self, set: impl IntoIterator<Item = usize>) -> SetProfile {
        let mut rows: Vec<usize> = set.into_iter().collect();
        rows.sort_unstable();
        rows.dedup();
        let mut profile = self.empty_profile();
        for row in rows {
            profile.insert(self, row);
        }
        profile
    }

    pub fn gain(&self, set: impl IntoIterator<Item = usize>) -> f64 {
        self.profile(set).value(self)
    }

    /// `gain(base ∪ addition) - gain(base)`; the two sets must be disjoint.
    pub fn marginal_gain(&self, base: &[usize], addition: &[usize]) -> Result<f64> {
        if let Some(dup) = addition.iter().find(|a| base.contains(a)) {
            return Err(Error::input(format!("row {dup} is in both base and addition")));
        }
        if addition.is_empty() {
            return Ok(0.0);
        }
        let union = base.iter().chain(addition).copied();
        Ok(self.gain(union) - self.gain(base.iter().copied()))
    }
}

/// Per-feature ratings of one POI set, each list sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SetProfile {
    sorted: Vec<Vec<f64>>,
}

impl SetProfile {
    pub fn insert(&mut self, ctx: &GainContext, row: usize) {
        for (list, &r) in self.sorted.iter_mut().zip(&ctx.rows[row]) {
            let pos = list.partition_point(|&a| a >= r);
            list.insert(pos, r);
        }
    }

    pub fn value(&self, ctx: &GainContext) -> f64 {
        self.sorted.iter().zip(&ctx.weights).map(|(list, w)| w * phi_sorted(ctx.spec, &ctx.rank_weights, list)).sum()
    }

    /// Gain added by one more row, computed without copying the profile.
    pub fn marginal(&self, ctx: &GainContext, row: usize) -> f64 {
        let mut total = 0.0;
        for ((list, &v), &w) in self.sorted.iter().zip(&ctx.rows[row]).zip(&ctx.weights) {
            if v <= 0.0 {
                continue;
            }
            let delta = match ctx.spec {
                AggregationSpec::PowerLaw { .. } => {
                    let rw = &ctx.rank_weights;
                    let pos = list.partition_point(|&a| a >= v);
                    let shifted: f64 =
                        list[pos..].iter().enumerate().map(|(k, &a)| a * (rw[pos + k + 1] - rw[pos + k])).sum();
                    v * rw[pos] + shifted
                }
                AggregationSpec::LogUtility => {
                    let s: f64 = list.iter().sum();
                    ((1.0 + s + v) / (1.0 + s)).ln()
                }
                AggregationSpec::Coverage => list.iter().map(|r| 1.0 - r).product::<f64>() * v,
            };
            total += w * delta;
        }
        total.max(0.0)
    }

    pub fn per_feature(&self) -> &[Vec<f64>] {
        &self.sorted
    }
}

/// Where a POI sits on a route, for the relaxed per-POI cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoiRole {
    Intermediate,
    /// The destination is entered but never left.
    Destination,
}

/// Stay cost plus half the cheapest way in and half the cheapest way out.
/// Never exceeds what visiting the POI actually adds to a route.
pub fn relaxed_cost(stay: f64, min_in: f64, min_out: f64, role: PoiRole) -> f64 {
    match role {
        PoiRole::Intermediate => stay + min_in / 2.0 + min_out / 2.0,
        PoiRole::Destination => stay + min_in / 2.0,
    }
}

/// [`relaxed_cost`] for a POI of `map`, using its stored stay cost.
pub fn relaxed_poi_cost(map: &PoiMap, idx: usize, role: PoiRole) -> Result<f64> {
    let id = map.poi(idx).id;
    let isolated = || Error::input(format!("POI {id} has no incident edge"));
    let min_in = map.min_in_edge(idx).ok_or_else(isolated)?;
    let min_out = match role {
        PoiRole::Intermediate => map.min_out_edge(idx).ok_or_else(isolated)?,
        PoiRole::Destination => 0.0,
    };
    Ok(relaxed_cost(map.poi(idx).stay, min_in, min_out, role))
}

/// One item of the relaxed knapsack: its single-POI marginal gain and its
/// relaxed cost. `key` breaks ratio ties, smaller first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundItem {
    pub key: usize,
    pub delta: f64,
    pub cost: f64,
}

/// Sorts items by gain/cost ratio, best first, ties by key.
pub fn sort_by_ratio(items: &mut [BoundItem]) {
    items.sort_by(|a, b| {
        let (ra, rb) = (a.delta / a.cost, b.delta / b.cost);
        rb.total_cmp(&ra).then(a.key.cmp(&b.key))
    });
}

/// Fractional knapsack over items already in ratio order: whole items while
/// they fit, then the fitting fraction of the first one that does not.
pub fn fractional_fill(sorted: impl IntoIterator<Item = BoundItem>, budget: f64) -> f64 {
    let mut used = 0.0;
    let mut total = 0.0;
    for item in sorted {
        if item.delta <= 0.0 {
            continue;
        }
        debug_assert!(item.cost > 0.0, "relaxed costs are positive on valid maps");
        if used + item.cost > budget {
            let lambda = ((budget - used) / item.cost).clamp(0.0, 1.0);
            total += lambda * item.delta;
            break;
        }
        used += item.cost;
        total += item.delta;
    }
    total
}

/// Upper bound on the marginal gain any closed completion can add to an
/// open route.
///
/// `reachable` holds `(row, relaxed cost)` for the unvisited POIs that fit
/// between the route's end and the destination on their own. `budget` is the
/// remaining budget minus half the end POI's cheapest out-edge. The
/// destination is always part of a completion, so its marginal gain is added
/// up front and its relaxed cost `y_cost` is taken off the budget before the
/// ratio sweep. Single-POI marginals against the current set over-estimate
/// every later marginal (submodularity), so the sweep never under-shoots.
/// Pass `y_row = None` when the destination is already in the set.
pub fn upper_bound_marginal(
    ctx: &GainContext,
    state: &SetProfile,
    reachable: &[(usize, f64)],
    budget: f64,
    y_row: Option<usize>,
    y_cost: f64,
) -> f64 {
    let delta_y = y_row.map_or(0.0, |y| state.marginal(ctx, y));
    let remaining = budget - y_cost;
    if remaining < 0.0 {
        return delta_y;
    }
    let mut items: Vec<BoundItem> =
        reachable.iter().map(|&(row, cost)| BoundItem { key: row, delta: state.marginal(ctx, row), cost }).collect();
    sort_by_ratio(&mut items);
    delta_y + fractional_fill(items, remaining)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_feature(ratings: &[f64], spec: AggregationSpec) -> GainContext {
        GainContext::new(spec, vec![1.0], ratings.iter().map(|&r| vec![r]).collect())
    }

    #[test]
    fn power_law_worked_values() {
        assert_eq!(phi(AggregationSpec::PowerLaw { alpha: 1.0 }, &[3.0, 5.0]), 6.5);
        assert_eq!(phi(AggregationSpec::PowerLaw { alpha: 2.0 }, &[3.0, 5.0]), 5.75);
        assert_eq!(phi(AggregationSpec::PowerLaw { alpha: 0.0 }, &[3.0, 5.0]), 8.0);
    }

    #[test]
    fn empty_multiset_is_zero() {
        for spec in [AggregationSpec::PowerLaw { alpha: 1.5 }, AggregationSpec::LogUtility, AggregationSpec::Coverage] {
            assert_eq!(phi(spec, &[]), 0.0);
        }
    }

    #[test]
    fn log_and_coverage_values() {
        assert!((phi(AggregationSpec::LogUtility, &[1.0, 2.0]) - 4f64.ln()).abs() < 1e-15);
        assert!((phi(AggregationSpec::Coverage, &[0.5, 0.5]) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_poi_gain_is_its_rating() {
        for alpha in [0.0, 0.5, 3.0] {
            let ctx = single_feature(&[4.0], AggregationSpec::PowerLaw { alpha });
            assert_eq!(ctx.gain([0]), 4.0);
        }
        assert_eq!(single_feature(&[4.0], AggregationSpec::Coverage).gain([]), 0.0);
    }

    #[test]
    fn marginal_edge_cases() {
        let ctx = single_feature(&[3.0, 5.0, 1.0], AggregationSpec::PowerLaw { alpha: 1.0 });
        assert_eq!(ctx.marginal_gain(&[0, 1], &[]).unwrap(), 0.0);
        assert_eq!(ctx.marginal_gain(&[], &[0, 1]).unwrap(), 6.5);
        assert!(ctx.marginal_gain(&[0], &[0, 2]).is_err());
    }

    #[test]
    fn incremental_marginal_matches_difference() {
        let ctx = single_feature(&[3.0, 5.0, 4.0, 5.0], AggregationSpec::PowerLaw { alpha: 0.7 });
        let profile = ctx.profile([0, 1]);
        for row in [2, 3] {
            let direct = ctx.gain([0, 1, row]) - ctx.gain([0, 1]);
            assert!((profile.marginal(&ctx, row) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn relaxed_cost_formula() {
        assert_eq!(relaxed_cost(10.0, 4.0, 4.0, PoiRole::Intermediate), 14.0);
        assert_eq!(relaxed_cost(0.0, 4.0, 9.0, PoiRole::Destination), 2.0);
    }

    #[test]
    fn relaxed_cost_on_map() {
        let map = PoiMap::from_document(&crate::sample::six_poi_map()).unwrap();
        // POI 3: stay 3, incident edges 4, 5, 3, 1.
        let idx = map.index_of(3).unwrap();
        assert_eq!(relaxed_poi_cost(&map, idx, PoiRole::Intermediate).unwrap(), 4.0);
        assert_eq!(relaxed_poi_cost(&map, idx, PoiRole::Destination).unwrap(), 3.5);
    }

    #[test]
    fn bound_without_reachable_items_is_destination_marginal() {
        let ctx = single_feature(&[2.0, 3.0], AggregationSpec::PowerLaw { alpha: 0.0 });
        let state = ctx.profile([0]);
        assert_eq!(upper_bound_marginal(&ctx, &state, &[], 100.0, Some(1), 1.0), 3.0);
        assert_eq!(upper_bound_marginal(&ctx, &state, &[], 0.5, Some(1), 1.0), 3.0);
    }

    #[test]
    fn bound_when_everything_fits_is_plain_sum() {
        let ctx = single_feature(&[1.0, 2.0, 3.0, 0.5], AggregationSpec::PowerLaw { alpha: 0.0 });
        let state = ctx.profile([0]);
        let up = upper_bound_marginal(&ctx, &state, &[(1, 2.0), (2, 2.0)], 10.0, Some(3), 1.0);
        assert_eq!(up, 5.5);
    }

    #[test]
    fn bound_takes_fraction_of_overflowing_item() {
        let ctx = single_feature(&[0.0, 4.0, 3.0], AggregationSpec::PowerLaw { alpha: 0.0 });
        let state = ctx.profile([0]);
        // Ratios 2.0 and 1.0. After the destination's cost 3.5 remains:
        // item 1 fits whole, then half of item 2.
        let up = upper_bound_marginal(&ctx, &state, &[(1, 2.0), (2, 3.0)], 4.5, Some(0), 1.0);
        assert_eq!(up, 4.0 + 0.5 * 3.0);
    }

    #[test]
    fn aggregation_doc_round_trip() {
        let doc = AggregationDoc { kind: "power_law".into(), alpha: Some(2.0) };
        let spec = AggregationSpec::from_doc(&doc).unwrap();
        assert_eq!(spec, AggregationSpec::PowerLaw { alpha: 2.0 });
        assert_eq!(spec.to_doc(), doc);
        assert!(AggregationSpec::from_doc(&AggregationDoc { kind: "max".into(), alpha: None }).is_err());
        assert!(AggregationSpec::from_doc(&AggregationDoc { kind: "power_law".into(), alpha: Some(-1.0) }).is_err());
    }
}

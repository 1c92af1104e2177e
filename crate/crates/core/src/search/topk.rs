use std::cmp::Ordering;

use crate::model::{PoiId, Route};

#[derive(Debug, Clone, PartialEq)]
pub struct TopKEntry {
    /// Candidate POIs on the route (endpoints excluded), ascending.
    pub members: Vec<PoiId>,
    pub route: Route,
    pub gain: f64,
    pub cost: f64,
}

impl TopKEntry {
    /// Ranking: higher gain, then lower cost, then the smaller id set.
    fn rank(&self, other: &TopKEntry) -> Ordering {
        other
            .gain
            .total_cmp(&self.gain)
            .then(self.cost.total_cmp(&other.cost))
            .then_with(|| self.members.cmp(&other.members))
    }
}

/// The k best closed routes found so far, at most one per POI set.
#[derive(Debug, Clone, PartialEq)]
pub struct TopK {
    k: usize,
    entries: Vec<TopKEntry>,
}

impl TopK {
    pub fn new(k: usize) -> Self {
        TopK { k, entries: Vec::with_capacity(k.min(1024)) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[TopKEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<TopKEntry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.k
    }

    /// Gain a route must reach to enter: the k-th gain once full.
    pub fn threshold(&self) -> f64 {
        if self.is_full() {
            self.entries.last().map_or(f64::NEG_INFINITY, |e| e.gain)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Cheap pre-check before building an entry. May return true for an
    /// entry [`TopK::insert`] later rejects, never the reverse.
    pub fn may_accept(&self, gain: f64, cost: f64) -> bool {
        if self.k == 0 {
            return false;
        }
        match self.entries.last() {
            Some(last) if self.is_full() => gain > last.gain || (gain == last.gain && cost <= last.cost),
            _ => true,
        }
    }

    /// Inserts `entry` if it ranks among the best k. A set already present
    /// keeps whichever of its routes is cheaper. Returns whether the list
    /// changed.
    pub fn insert(&mut self, entry: TopKEntry) -> bool {
        if self.k == 0 {
            return false;
        }
        if let Some(i) = self.entries.iter().position(|e| e.members == entry.members) {
            if entry.cost.total_cmp(&self.entries[i].cost).then(entry.gain.total_cmp(&self.entries[i].gain).reverse())
                != Ordering::Less
            {
                return false;
            }
            self.entries.remove(i);
        } else if self.is_full() && entry.rank(self.entries.last().expect("full")) != Ordering::Less {
            return false;
        }
        let pos = self.entries.partition_point(|e| e.rank(&entry) == Ordering::Less);
        self.entries.insert(pos, entry);
        self.entries.truncate(self.k);
        true
    }
}

/// Offers one closed route to the list; see [`TopK::insert`].
pub fn update_topk(topk: &mut TopK, entry: TopKEntry) -> bool {
    topk.insert(entry)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(members: &[PoiId], gain: f64, cost: f64) -> TopKEntry {
        let mut pois = vec![0];
        pois.extend_from_slice(members);
        pois.push(99);
        TopKEntry { members: members.to_vec(), route: Route::closed(pois, cost), gain, cost }
    }

    #[test]
    fn keeps_best_k_in_order() {
        let mut t = TopK::new(2);
        assert!(t.insert(entry(&[1], 1.0, 5.0)));
        assert!(t.insert(entry(&[2], 2.0, 5.0)));
        assert!(!t.insert(entry(&[3], 0.5, 1.0)));
        assert!(t.insert(entry(&[4], 1.0, 4.0)));
        let gains: Vec<_> = t.entries().iter().map(|e| (e.members[0], e.gain)).collect();
        assert_eq!(gains, vec![(2, 2.0), (4, 1.0)]);
        assert_eq!(t.threshold(), 1.0);
    }

    #[test]
    fn same_set_keeps_cheaper_route() {
        let mut t = TopK::new(3);
        assert!(t.insert(entry(&[1, 2], 3.0, 10.0)));
        assert!(!t.insert(entry(&[1, 2], 3.0, 11.0)));
        assert!(t.insert(entry(&[1, 2], 3.0, 9.0)));
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries()[0].cost, 9.0);
    }

    #[test]
    fn ties_break_on_cost_then_ids() {
        let mut t = TopK::new(3);
        t.insert(entry(&[5], 1.0, 3.0));
        t.insert(entry(&[4], 1.0, 3.0));
        t.insert(entry(&[6], 1.0, 2.0));
        let order: Vec<_> = t.entries().iter().map(|e| e.members[0]).collect();
        assert_eq!(order, vec![6, 4, 5]);
    }

    #[test]
    fn threshold_is_open_until_full() {
        let mut t = TopK::new(2);
        t.insert(entry(&[1], 4.0, 1.0));
        assert_eq!(t.threshold(), f64::NEG_INFINITY);
        assert!(t.may_accept(-1.0, 100.0));
        t.insert(entry(&[2], 3.0, 1.0));
        assert!(!t.may_accept(2.0, 0.0));
        assert!(t.may_accept(3.0, 1.0));
    }

    #[test]
    fn zero_k_accepts_nothing() {
        let mut t = TopK::new(0);
        assert!(!t.insert(entry(&[], 1.0, 1.0)));
        assert!(t.is_empty());
    }
}

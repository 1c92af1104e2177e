//! 2-hop label index built by pruned landmark labeling.
//!
//! Every POI carries a list of labels `(pivot, d)`; directed maps carry an
//! out-list (`d` = cost from the POI to the pivot) and an in-list (`d` = cost
//! from the pivot to the POI). The least travel cost between `i` and `j` is
//! the minimum of `d1 + d2` over pivots common to the out-list of `i` and the
//! in-list of `j`. Only costs are returned, so which of several equally short
//! paths a label came from does not matter.
//!
//! Pivots are processed by descending degree (ties by map position). A
//! pruned Dijkstra from each pivot adds a label only where the labels built
//! so far cannot already certify the distance, which keeps the cover exact.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DistanceOracle, PoiId, PoiMap};

/// Leading bytes of a serialized [`HopIndex`].
pub const INDEX_MAGIC: &[u8; 8] = b"PCRIDX1\n";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    /// Dense map position of the pivot POI.
    pub pivot: u32,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopIndex {
    directed: bool,
    ids: Vec<PoiId>,
    order: Vec<u32>,
    out_labels: Vec<Vec<Label>>,
    // Empty for undirected maps.
    in_labels: Vec<Vec<Label>>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    poi_count: usize,
    directed: bool,
    order: Vec<u32>,
    ids: Vec<PoiId>,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Reusable scratch space for many label merges against the same index.
pub struct LabelQuery {
    scratch: Vec<f64>,
}

impl LabelQuery {
    pub fn new(poi_count: usize) -> Self {
        LabelQuery { scratch: vec![f64::INFINITY; poi_count] }
    }

    /// Minimum `d1 + d2` over common pivots. Touches each label once.
    pub fn query(&mut self, from: &[Label], to: &[Label]) -> Option<f64> {
        for l in from {
            self.scratch[l.pivot as usize] = l.d;
        }
        let mut best = f64::INFINITY;
        for l in to {
            let total = self.scratch[l.pivot as usize] + l.d;
            if total < best {
                best = total;
            }
        }
        for l in from {
            self.scratch[l.pivot as usize] = f64::INFINITY;
        }
        best.is_finite().then_some(best)
    }
}

/// Merge of two label lists; returns the cost and how many labels were visited.
pub(crate) fn merge_counted(from: &[Label], to: &[Label]) -> (Option<f64>, usize) {
    let mut pivots: HashMap<u32, f64> = HashMap::with_capacity(from.len());
    for l in from {
        pivots.insert(l.pivot, l.d);
    }
    let mut best = f64::INFINITY;
    for l in to {
        if let Some(d1) = pivots.get(&l.pivot) {
            best = best.min(d1 + l.d);
        }
    }
    (best.is_finite().then_some(best), from.len() + to.len())
}

pub fn build_hop_index(map: &PoiMap) -> HopIndex {
    let n = map.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (Reverse(map.degree(v as usize)), v));
    let mut rank = vec![0u32; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v as usize] = r as u32;
    }

    let mut out_labels: Vec<Vec<Label>> = vec![Vec::new(); n];
    let mut in_labels: Vec<Vec<Label>> = vec![Vec::new(); n];
    let mut search = PrunedSearch::new(n);

    for &root in &order {
        let root = root as usize;
        if map.is_directed() {
            // Forward search fills in-lists, backward search fills out-lists.
            search.run(root, &out_labels[root], &mut in_labels, |u| map.out_edges(u));
            search.run(root, &in_labels[root].clone(), &mut out_labels, |u| map.in_edges(u));
        } else {
            let root_labels = out_labels[root].clone();
            search.run(root, &root_labels, &mut out_labels, |u| map.out_edges(u));
        }
    }

    let by_cost = |a: &Label, b: &Label| a.d.total_cmp(&b.d).then(rank[a.pivot as usize].cmp(&rank[b.pivot as usize]));
    for list in out_labels.iter_mut().chain(in_labels.iter_mut()) {
        list.sort_by(by_cost);
    }

    HopIndex {
        directed: map.is_directed(),
        ids: map.pois().iter().map(|p| p.id).collect(),
        order,
        out_labels,
        in_labels,
    }
}

struct PrunedSearch {
    tmp: Vec<f64>,
    dist: Vec<f64>,
    touched: Vec<usize>,
    heap: BinaryHeap<Reverse<(Key, usize)>>,
}

impl PrunedSearch {
    fn new(n: usize) -> Self {
        PrunedSearch {
            tmp: vec![f64::INFINITY; n],
            dist: vec![f64::INFINITY; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn run<'m>(
        &mut self,
        root: usize,
        root_labels: &[Label],
        targets: &mut [Vec<Label>],
        neighbors: impl Fn(usize) -> &'m [(usize, f64)],
    ) {
        for l in root_labels {
            self.tmp[l.pivot as usize] = l.d;
        }
        self.dist[root] = 0.0;
        self.touched.push(root);
        self.heap.push(Reverse((Key(0.0), root)));
        while let Some(Reverse((Key(d), u))) = self.heap.pop() {
            if d > self.dist[u] {
                continue;
            }
            let covered = targets[u].iter().map(|l| self.tmp[l.pivot as usize] + l.d).fold(f64::INFINITY, f64::min);
            if covered <= d {
                continue;
            }
            targets[u].push(Label { pivot: root as u32, d });
            for &(w, c) in neighbors(u) {
                let nd = d + c;
                if nd < self.dist[w] {
                    if self.dist[w].is_infinite() {
                        self.touched.push(w);
                    }
                    self.dist[w] = nd;
                    self.heap.push(Reverse((Key(nd), w)));
                }
            }
        }
        for &u in &self.touched {
            self.dist[u] = f64::INFINITY;
        }
        self.touched.clear();
        for l in root_labels {
            self.tmp[l.pivot as usize] = f64::INFINITY;
        }
    }
}

impl HopIndex {
    /// Assembles an index from explicit label lists (dense positions).
    /// `in_labels` must be empty for undirected indices.
    pub fn from_labels(
        directed: bool,
        ids: Vec<PoiId>,
        mut out_labels: Vec<Vec<Label>>,
        mut in_labels: Vec<Vec<Label>>,
    ) -> Result<Self> {
        let n = ids.len();
        if out_labels.len() != n || (directed && in_labels.len() != n) || (!directed && !in_labels.is_empty()) {
            return Err(Error::Format("label list count does not match POI count".into()));
        }
        for list in out_labels.iter_mut().chain(in_labels.iter_mut()) {
            if list.iter().any(|l| l.pivot as usize >= n || !(l.d.is_finite() && l.d >= 0.0)) {
                return Err(Error::Format("label pivot out of range or negative cost".into()));
            }
            list.sort_by(|a, b| a.d.total_cmp(&b.d).then(a.pivot.cmp(&b.pivot)));
        }
        Ok(HopIndex { directed, order: (0..n as u32).collect(), ids, out_labels, in_labels })
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PoiId] {
        &self.ids
    }

    pub fn vertex_order(&self) -> &[u32] {
        &self.order
    }

    /// True if this index was built for a map with exactly these POIs.
    pub fn matches(&self, map: &PoiMap) -> bool {
        self.directed == map.is_directed()
            && self.ids.len() == map.len()
            && self.ids.iter().zip(map.pois()).all(|(&a, p)| a == p.id)
    }

    pub fn out_labels(&self, idx: usize) -> &[Label] {
        &self.out_labels[idx]
    }

    pub fn in_labels(&self, idx: usize) -> &[Label] {
        if self.directed {
            &self.in_labels[idx]
        } else {
            &self.out_labels[idx]
        }
    }

    pub fn label_count(&self) -> usize {
        self.out_labels.iter().chain(&self.in_labels).map(Vec::len).sum()
    }

    fn position(&self, id: PoiId) -> Result<usize> {
        self.ids.iter().position(|&x| x == id).ok_or(Error::UnknownPoi(id))
    }

    /// Least travel cost from `from` to `to`, by POI id.
    pub fn least_travel_cost(&self, from: PoiId, to: PoiId) -> Result<f64> {
        let (i, j) = (self.position(from)?, self.position(to)?);
        if i == j {
            return Ok(0.0);
        }
        merge_counted(self.out_labels(i), self.in_labels(j)).0.ok_or(Error::Unreachable { from, to })
    }

    /// Same as [`least_travel_cost`](Self::least_travel_cost) on dense
    /// positions, also reporting how many labels the merge visited.
    pub fn travel_cost_counted(&self, i: usize, j: usize) -> (Option<f64>, usize) {
        if i == j {
            return (Some(0.0), 0);
        }
        merge_counted(self.out_labels(i), self.in_labels(j))
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(INDEX_MAGIC)?;
        let header = Header {
            poi_count: self.ids.len(),
            directed: self.directed,
            order: self.order.clone(),
            ids: self.ids.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for i in 0..self.ids.len() {
            write_list(&mut w, &self.out_labels[i])?;
            if self.directed {
                write_list(&mut w, &self.in_labels[i])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(mut r: impl BufRead) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != INDEX_MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let mut line = Vec::new();
        r.read_until(b'\n', &mut line)?;
        let header: Header = serde_json::from_slice(&line)?;
        if header.ids.len() != header.poi_count || header.order.len() != header.poi_count {
            return Err(Error::Format("header counts disagree".into()));
        }
        let n = header.poi_count;
        let mut out_labels = Vec::with_capacity(n);
        let mut in_labels = Vec::new();
        for _ in 0..n {
            out_labels.push(read_list(&mut r, n)?);
            if header.directed {
                in_labels.push(read_list(&mut r, n)?);
            }
        }
        Ok(HopIndex { directed: header.directed, ids: header.ids, order: header.order, out_labels, in_labels })
    }
}

fn write_list(w: &mut impl Write, list: &[Label]) -> Result<()> {
    w.write_all(&(list.len() as u32).to_le_bytes())?;
    for l in list {
        w.write_all(&l.pivot.to_le_bytes())?;
        w.write_all(&l.d.to_le_bytes())?;
    }
    Ok(())
}

fn read_list(r: &mut impl Read, n: usize) -> Result<Vec<Label>> {
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let len = u32::from_le_bytes(b4) as usize;
    if len > n {
        return Err(Error::Format("label list longer than POI count".into()));
    }
    let mut list = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut b4)?;
        r.read_exact(&mut b8)?;
        let pivot = u32::from_le_bytes(b4);
        if pivot as usize >= n {
            return Err(Error::Format(format!("pivot {pivot} out of range")));
        }
        list.push(Label { pivot, d: f64::from_le_bytes(b8) });
    }
    Ok(list)
}

impl DistanceOracle for HopIndex {
    fn travel_cost(&self, from: usize, to: usize) -> Option<f64> {
        self.travel_cost_counted(from, to).0
    }
}

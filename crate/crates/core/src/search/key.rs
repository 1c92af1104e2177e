//! Compact-state keys: candidate sets as bitmasks, ordered numerically.
//!
//! Visiting sets in increasing numeric order is the same order as a
//! prefix-first walk of the set-enumeration tree, and it guarantees every
//! proper subset of a set is finished before the set itself.

use std::cmp::Ordering;
use std::hash::Hash;

pub(crate) trait StateKey: Clone + Eq + Ord + Hash {
    fn empty(width: usize) -> Self;
    fn with(&self, row: usize) -> Self;
    fn without(&self, row: usize) -> Self;
    fn contains(&self, row: usize) -> bool;
    /// Member rows, ascending.
    fn rows(&self) -> Vec<usize>;
    fn heap_bytes(&self) -> usize;
}

impl StateKey for u128 {
    fn empty(width: usize) -> Self {
        debug_assert!(width <= 128);
        0
    }

    fn with(&self, row: usize) -> Self {
        self | (1u128 << row)
    }

    fn without(&self, row: usize) -> Self {
        self & !(1u128 << row)
    }

    fn contains(&self, row: usize) -> bool {
        self >> row & 1 == 1
    }

    fn rows(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones() as usize);
        let mut bits = *self;
        while bits != 0 {
            out.push(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
        out
    }

    fn heap_bytes(&self) -> usize {
        0
    }
}

/// Bitmask for more than 128 candidates, little-endian words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct WideKey(Box<[u64]>);

impl Ord for WideKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for WideKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl StateKey for WideKey {
    fn empty(width: usize) -> Self {
        WideKey(vec![0; width.div_ceil(64).max(1)].into_boxed_slice())
    }

    fn with(&self, row: usize) -> Self {
        let mut words = self.0.clone();
        words[row / 64] |= 1 << (row % 64);
        WideKey(words)
    }

    fn without(&self, row: usize) -> Self {
        let mut words = self.0.clone();
        words[row / 64] &= !(1 << (row % 64));
        WideKey(words)
    }

    fn contains(&self, row: usize) -> bool {
        self.0[row / 64] >> (row % 64) & 1 == 1
    }

    fn rows(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    fn heap_bytes(&self) -> usize {
        self.0.len() * 8
    }
}

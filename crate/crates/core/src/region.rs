//! Vertex and edge subsets backed by bitsets.

use fixedbitset::FixedBitSet;
use std::fmt;

use crate::game::Game;

/// A set of vertex ids of one game.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegionSet {
    bits: FixedBitSet,
}

impl RegionSet {
    pub fn empty(n: usize) -> Self {
        RegionSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        RegionSet { bits }
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(n: usize, ids: I) -> Self {
        let mut set = Self::empty(n);
        for v in ids {
            set.insert(v);
        }
        set
    }

    pub fn from_predicate(n: usize, pred: impl Fn(usize) -> bool) -> Self {
        Self::from_ids(n, (0..n).filter(|&v| pred(v)))
    }

    /// Size of the underlying vertex universe.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        let fresh = !self.bits.contains(v);
        self.bits.insert(v);
        fresh
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.set(v, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &RegionSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &RegionSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &RegionSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &RegionSet) -> RegionSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &RegionSet) -> RegionSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &RegionSet) -> RegionSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn complement(&self) -> RegionSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        RegionSet { bits }
    }

    pub fn is_subset(&self, other: &RegionSet) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for RegionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A set of edges, addressed by their index in the owning game's edge array.
#[derive(Clone, PartialEq, Eq)]
pub struct EdgeSet {
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn empty(g: &Game) -> Self {
        EdgeSet {
            bits: FixedBitSet::with_capacity(g.num_edges()),
        }
    }

    pub fn all(g: &Game) -> Self {
        let mut set = Self::empty(g);
        set.bits.insert_range(..);
        set
    }

    pub fn contains(&self, e: usize) -> bool {
        self.bits.contains(e)
    }

    pub fn insert(&mut self, e: usize) {
        self.bits.insert(e);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn contains_pair(&self, g: &Game, from: usize, to: usize) -> bool {
        g.edge_index(from, to).is_some_and(|e| self.contains(e))
    }

    /// Inserts the edge `from -> to`; returns false if it is not an edge of `g`.
    pub fn insert_pair(&mut self, g: &Game, from: usize, to: usize) -> bool {
        match g.edge_index(from, to) {
            Some(e) => {
                self.insert(e);
                true
            }
            None => false,
        }
    }

    /// The set as sorted `(from, to)` pairs.
    pub fn pairs(&self, g: &Game) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.iter().map(|e| (g.edge_source(e), g.edge_target(e))).collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}

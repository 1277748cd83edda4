//! Pure memoryless strategies and value vectors.

use num_traits::{One, Signed};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::game::{Game, Player};
use crate::rational::{format_fraction, Rational};

/// A pure memoryless strategy of one player, stored densely over all vertex
/// ids; only the player's own vertices carry a choice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub player: Player,
    choice: Vec<Option<usize>>,
}

impl Strategy {
    /// A strategy with no choices yet.
    pub fn empty(player: Player, n: usize) -> Self {
        Strategy {
            player,
            choice: vec![None; n],
        }
    }

    /// Picks the first successor in edge order at every vertex of `player`.
    pub fn first_successor(g: &Game, player: Player) -> Self {
        let mut f = Self::empty(player, g.num_vertices());
        for v in g.vertices_of(player.owner()) {
            f.set(v, g.successors(v)[0]);
        }
        f
    }

    /// Picks the smallest-id successor at every vertex of `player`.
    pub fn smallest_successor(g: &Game, player: Player) -> Self {
        let mut f = Self::empty(player, g.num_vertices());
        for v in g.vertices_of(player.owner()) {
            f.set(v, *g.successors(v).iter().min().expect("sinkless"));
        }
        f
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(player: Player, n: usize, pairs: I) -> Self {
        let mut f = Self::empty(player, n);
        for (v, w) in pairs {
            f.set(v, w);
        }
        f
    }

    pub fn num_vertices(&self) -> usize {
        self.choice.len()
    }

    pub fn choice(&self, v: usize) -> Option<usize> {
        self.choice.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: usize, w: usize) {
        self.choice[v] = Some(w);
    }

    pub fn clear(&mut self, v: usize) {
        self.choice[v] = None;
    }

    /// `(vertex, successor)` pairs in increasing vertex order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choice.iter().enumerate().filter_map(|(v, c)| c.map(|w| (v, w)))
    }

    pub fn is_empty(&self) -> bool {
        self.choice.iter().all(Option::is_none)
    }

    /// Checks that the strategy is total on the player's vertices, picks only
    /// edges and says nothing about other vertices.
    pub fn check(&self, g: &Game) -> Result<()> {
        if self.choice.len() != g.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: g.num_vertices(),
                found: self.choice.len(),
            });
        }
        let owner = self.player.owner();
        for v in 0..g.num_vertices() {
            match self.choice[v] {
                Some(w) if g.owner(v) == owner && g.has_edge(v, w) => {}
                None if g.owner(v) != owner => {}
                _ => return Err(Error::StrategyMismatch { vertex: v }),
            }
        }
        Ok(())
    }

    /// Renumbers a strategy of a subgame into the parent game's ids.
    pub fn lift_from(&self, origin: &[usize], parent_n: usize) -> Strategy {
        let mut f = Strategy::empty(self.player, parent_n);
        for (v, w) in self.pairs() {
            f.set(origin[v], origin[w]);
        }
        f
    }
}

/// Exact per-vertex values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueVector(pub Vec<Rational>);

impl ValueVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn in_unit_interval(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative() && *x <= Rational::one())
    }

    /// Pointwise `self >= other`.
    pub fn dominates(&self, other: &ValueVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Pointwise `>=` and strictly greater somewhere.
    pub fn strictly_dominates(&self, other: &ValueVector) -> bool {
        self.dominates(other) && self != other
    }

    /// Hex SHA-256 over the exact `num/den` entries; equal vectors have equal digests.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for x in &self.0 {
            h.update(format_fraction(x).as_bytes());
            h.update(b";");
        }
        let mut out = String::with_capacity(64);
        for byte in h.finalize().iter() {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }
}

impl Index<usize> for ValueVector {
    type Output = Rational;
    fn index(&self, v: usize) -> &Rational {
        &self.0[v]
    }
}

impl From<Vec<Rational>> for ValueVector {
    fn from(v: Vec<Rational>) -> Self {
        ValueVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::example_pe;
    use crate::rational::rat;

    #[test]
    fn check_rejects_non_edges_and_partial() {
        let g = example_pe();
        let ok = Strategy::from_pairs(Player::P0, 6, [(0, 1)]);
        assert!(ok.check(&g).is_ok());
        let bad = Strategy::from_pairs(Player::P0, 6, [(0, 4)]);
        assert_eq!(bad.check(&g), Err(Error::StrategyMismatch { vertex: 0 }));
        let partial = Strategy::empty(Player::P0, 6);
        assert!(partial.check(&g).is_err());
        let foreign = Strategy::from_pairs(Player::P0, 6, [(0, 1), (1, 0)]);
        assert!(foreign.check(&g).is_err());
    }

    #[test]
    fn digest_is_value_sensitive() {
        let a = ValueVector(vec![rat(1, 2), rat(1, 1)]);
        let b = ValueVector(vec![rat(2, 4), rat(1, 1)]);
        let c = ValueVector(vec![rat(1, 3), rat(1, 1)]);
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert!(a.strictly_dominates(&c));
        assert!(!c.dominates(&a));
    }
}

//! Strategy improvement for 2.5-player reachability games.

use crate::error::{Error, Result};
use crate::eval::{reach_policy_iteration, Mode};
use crate::game::{Game, Owner, Player};
use crate::options::SolveOptions;
use crate::quali::attractor_in;
use crate::region::RegionSet;
use crate::strategy::{Strategy, ValueVector};

#[derive(Clone, Debug, PartialEq)]
pub struct ReachSolveResult {
    pub values: ValueVector,
    pub strategy0: Strategy,
    pub strategy1: Strategy,
    /// Number of improvement rounds that switched at least one edge.
    pub iterations: usize,
}

/// Vertices from which Player 0 cannot reach `target` with positive probability.
pub fn zero_value_region(g: &Game, target: &RegionSet) -> RegionSet {
    let alive = RegionSet::full(g.num_vertices());
    attractor_in(g, &g.predecessors(), &alive, Player::P0, target)
        .0
        .complement()
}

pub fn reach_solve(g: &Game, target: &RegionSet) -> Result<ReachSolveResult> {
    reach_solve_with(g, target, &SolveOptions::default())
}

pub fn reach_solve_with(g: &Game, target: &RegionSet, opts: &SolveOptions) -> Result<ReachSolveResult> {
    g.validate().map_err(|e| Error::InvalidGame(Box::new(e)))?;
    let n = g.num_vertices();
    if target.universe() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.universe(),
        });
    }
    let game = g.make_absorbing(target);
    let pred = game.predecessors();

    // Every attractor vertex was pulled in by a successor that joined
    // earlier; following those successors keeps every value positive outside
    // the zero region from the start.
    let (attr, pulled) = attractor_in(&game, &pred, &RegionSet::full(n), Player::P0, target);
    let zero = attr.complement();
    let mut f0 = Strategy::smallest_successor(&game, Player::P0);
    for (v, w) in pulled {
        f0.set(v, w);
    }

    let mut iterations = 0;
    let mut warm: Option<Vec<Option<usize>>> = None;
    loop {
        opts.check()?;
        let mdp = crate::game::induced_mdp(&game, &f0)?;
        let (x, choice1) = reach_policy_iteration(&mdp, target, Mode::Minimize, Owner::P1, warm.as_deref());
        let mut changed = false;
        for v in game.vertices_of(Owner::P0) {
            if target.contains(v) || zero.contains(v) {
                continue;
            }
            let cur = f0.choice(v).expect("total");
            let mut best = cur;
            for &w in game.successors(v) {
                if x[w] > x[best] || (x[w] == x[best] && w < best && x[w] > x[cur]) {
                    best = w;
                }
            }
            if best != cur {
                f0.set(v, best);
                changed = true;
            }
        }
        if !changed {
            // Report the original edges at target vertices.
            let mut s0 = Strategy::smallest_successor(g, Player::P0);
            let mut s1 = Strategy::smallest_successor(g, Player::P1);
            for (v, c1) in choice1.iter().enumerate() {
                if target.contains(v) {
                    continue;
                }
                match g.owner(v) {
                    Owner::P0 => s0.set(v, f0.choice(v).expect("total")),
                    Owner::P1 => s1.set(v, c1.expect("controller choice")),
                    Owner::Random => {}
                }
            }
            return Ok(ReachSolveResult {
                values: ValueVector(x),
                strategy0: s0,
                strategy1: s1,
                iterations,
            });
        }
        iterations += 1;
        warm = Some(choice1);
    }
}

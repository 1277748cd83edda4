//! Almost-sure winning regions, attractors, and the brute-force value oracle.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::chain_parity_values;
use crate::game::{even_min_wins, Game, Kind, Owner, Player};
use crate::linear::Chain;
use crate::options::{QualiEngine, SolveOptions};
use crate::rational::Rational;
use crate::region::RegionSet;
use crate::strategy::{Strategy, ValueVector};

#[derive(Clone, Debug, PartialEq)]
pub struct QualiResult {
    /// Vertices Player 0 wins almost surely.
    pub w0: RegionSet,
    /// Player 0 strategy winning almost surely from every vertex of `w0`.
    pub witness: Strategy,
    /// Vertices of value 0 for Player 0.
    pub w1: RegionSet,
}

/// Positive-probability attractor of `target` for `player` inside `alive`:
/// player and random vertices join when some successor is inside, opponent
/// vertices when all their successors in `alive` are. Also returns, for each
/// joining vertex of `player`, the successor that pulled it in.
pub(crate) fn attractor_in(
    g: &Game,
    pred: &[Vec<usize>],
    alive: &RegionSet,
    player: Player,
    target: &RegionSet,
) -> (RegionSet, Vec<(usize, usize)>) {
    let n = g.num_vertices();
    let own = player.owner();
    let opp = player.opponent().owner();
    let mut attr = target.intersection(alive);
    let mut queue: Vec<usize> = attr.to_vec();
    let mut pulled = Vec::new();
    let mut remaining: Vec<u32> = vec![u32::MAX; n];
    let mut head = 0;
    while head < queue.len() {
        let w = queue[head];
        head += 1;
        for &u in &pred[w] {
            if !alive.contains(u) || attr.contains(u) {
                continue;
            }
            let owner = g.owner(u);
            let joins = if owner == opp {
                if remaining[u] == u32::MAX {
                    remaining[u] = g.successors(u).iter().filter(|&&x| alive.contains(x)).count() as u32;
                }
                remaining[u] -= 1;
                remaining[u] == 0
            } else {
                if owner == own {
                    pulled.push((u, w));
                }
                true
            };
            if joins {
                attr.insert(u);
                queue.push(u);
            }
        }
    }
    (attr, pulled)
}

pub fn positive_attractor(g: &Game, player: Player, target: &RegionSet) -> RegionSet {
    let alive = RegionSet::full(g.num_vertices());
    attractor_in(g, &g.predecessors(), &alive, player, target).0
}

/// Recursive almost-sure solver. Each `solve` call works on a subgame given
/// as a vertex set closed under random moves in which every controlled vertex
/// keeps a successor.
struct Recursive<'a> {
    g: &'a Game,
    pred: Vec<Vec<usize>>,
    opts: &'a SolveOptions,
}

enum Found {
    /// The whole subgame is won almost surely; the witness has been written.
    Certified,
    /// A nonempty set where Player 1 wins with positive probability.
    Positive(RegionSet),
}

impl Recursive<'_> {
    fn solve(&self, g: RegionSet, strat: &mut [Option<usize>]) -> Result<RegionSet> {
        stacker::maybe_grow(256 * 1024, 8 * 1024 * 1024, || self.solve_inner(g, strat))
    }

    fn solve_inner(&self, mut sub: RegionSet, strat: &mut [Option<usize>]) -> Result<RegionSet> {
        loop {
            self.opts.check()?;
            if sub.is_empty() {
                return Ok(sub);
            }
            match self.find(&sub, strat)? {
                Found::Certified => return Ok(sub),
                Found::Positive(x) => {
                    let (a, _) = attractor_in(self.g, &self.pred, &sub, Player::P1, &x);
                    sub.difference_with(&a);
                }
            }
        }
    }

    fn find(&self, sub: &RegionSet, strat: &mut [Option<usize>]) -> Result<Found> {
        let g = self.g;
        let p = sub.iter().map(|v| g.priority(v)).min().expect("nonempty");
        let top = RegionSet::from_ids(sub.universe(), sub.iter().filter(|&v| g.priority(v) == p));
        if even_min_wins(p) {
            let (a, pulled) = attractor_in(g, &self.pred, sub, Player::P0, &top);
            let rest = sub.difference(&a);
            let won = self.solve(rest.clone(), strat)?;
            let lost = rest.difference(&won);
            if !lost.is_empty() {
                return Ok(Found::Positive(lost));
            }
            for (u, w) in pulled {
                strat[u] = Some(w);
            }
            for v in top.iter().filter(|&v| g.owner(v) == Owner::P0) {
                strat[v] = g.successors(v).iter().copied().filter(|&w| sub.contains(w)).min();
            }
            Ok(Found::Certified)
        } else {
            let (a, _) = attractor_in(g, &self.pred, sub, Player::P1, &top);
            let rest = sub.difference(&a);
            let won = self.solve(rest, strat)?;
            if won.is_empty() {
                return Ok(Found::Positive(sub.clone()));
            }
            let (b, pulled) = attractor_in(g, &self.pred, sub, Player::P0, &won);
            let rest = sub.difference(&b);
            let won2 = self.solve(rest.clone(), strat)?;
            let lost = rest.difference(&won2);
            if !lost.is_empty() {
                return Ok(Found::Positive(lost));
            }
            for (u, w) in pulled {
                strat[u] = Some(w);
            }
            Ok(Found::Certified)
        }
    }
}

/// Almost-sure winning region of Player 0 with a witness, by the recursive
/// engine. Vertices outside the region get their smallest-id successor.
fn recursive_region(g: &Game, opts: &SolveOptions) -> Result<(RegionSet, Strategy)> {
    let n = g.num_vertices();
    let engine = Recursive {
        g,
        pred: g.predecessors(),
        opts,
    };
    let mut choice = vec![None; n];
    let w0 = engine.solve(RegionSet::full(n), &mut choice)?;
    let mut witness = Strategy::smallest_successor(g, Player::P0);
    for v in w0.iter().filter(|&v| g.owner(v) == Owner::P0) {
        witness.set(v, choice[v].expect("certified vertex has a choice"));
    }
    Ok((w0, witness))
}

fn require_parity(g: &Game) -> Result<()> {
    if g.kind() != Kind::Parity {
        return Err(Error::WrongKind { expected: "parity" });
    }
    Ok(())
}

/// Product of out-degrees over controlled vertices, saturating.
pub fn profile_count(g: &Game) -> u64 {
    (0..g.num_vertices())
        .filter(|&v| g.owner(v) != Owner::Random)
        .fold(1u64, |acc, v| acc.saturating_mul(g.out_degree(v) as u64))
}

pub fn quali_solve(g: &Game) -> Result<QualiResult> {
    quali_solve_with(g, &SolveOptions::default())
}

pub fn quali_solve_with(g: &Game, opts: &SolveOptions) -> Result<QualiResult> {
    require_parity(g)?;
    g.validate().map_err(|e| Error::InvalidGame(Box::new(e)))?;
    let engine = match opts.engine {
        QualiEngine::Auto => {
            if profile_count(g) <= opts.brute_cap {
                QualiEngine::BruteForce
            } else if g.num_vertices() <= opts.reduction_cap {
                QualiEngine::Reduction
            } else {
                QualiEngine::Recursive
            }
        }
        e => e,
    };
    match engine {
        QualiEngine::Recursive | QualiEngine::Auto => {
            let (w0, witness) = recursive_region(g, opts)?;
            let (w1, _) = recursive_region(&g.dual(), opts)?;
            Ok(QualiResult { w0, witness, w1 })
        }
        QualiEngine::BruteForce => {
            let r = brute_force_with(g, opts)?;
            Ok(from_values(g, &r.values, &r.strategy0))
        }
        QualiEngine::Reduction => {
            let r = crate::reduction::oracle_solve_with(g, opts)?;
            Ok(from_values(g, &r.values, &r.strategy0))
        }
    }
}

/// Player 0's almost-sure region and witness only (no value-0 region).
pub(crate) fn winning_region(g: &Game, opts: &SolveOptions) -> Result<(RegionSet, Strategy)> {
    if opts.engine == QualiEngine::Recursive {
        require_parity(g)?;
        g.validate().map_err(|e| Error::InvalidGame(Box::new(e)))?;
        return recursive_region(g, opts);
    }
    let r = quali_solve_with(g, opts)?;
    Ok((r.w0, r.witness))
}

fn from_values(g: &Game, values: &ValueVector, f0: &Strategy) -> QualiResult {
    let n = g.num_vertices();
    let w0 = RegionSet::from_predicate(n, |v| values[v].is_one());
    let w1 = RegionSet::from_predicate(n, |v| values[v].is_zero());
    let mut witness = Strategy::smallest_successor(g, Player::P0);
    for v in w0.iter() {
        if let Some(w) = f0.choice(v) {
            witness.set(v, w);
        }
    }
    QualiResult { w0, witness, w1 }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteResult {
    pub values: ValueVector,
    pub strategy0: Strategy,
    pub strategy1: Strategy,
    /// Set when no single Player 0 strategy is pointwise optimal; the
    /// strategies then only attain the value at vertex 0.
    pub flagged: bool,
}

pub fn brute_force_values(g: &Game) -> Result<(ValueVector, Strategy, Strategy)> {
    let r = brute_force_with(g, &SolveOptions::default())?;
    Ok((r.values, r.strategy0, r.strategy1))
}

struct Enumerator {
    vertices: Vec<usize>,
    choices: Vec<Vec<usize>>,
    count: u64,
}

impl Enumerator {
    fn new(g: &Game, owner: Owner) -> Self {
        let vertices: Vec<usize> = g.vertices_of(owner).collect();
        let choices: Vec<Vec<usize>> = vertices.iter().map(|&v| g.successors(v).to_vec()).collect();
        let count = choices.iter().fold(1u64, |a, c| a.saturating_mul(c.len() as u64));
        Enumerator {
            vertices,
            choices,
            count,
        }
    }

    /// Mixed-radix decoding of profile `index` into `choice`, first vertex
    /// varying fastest.
    fn fill(&self, mut index: u64, choice: &mut [Option<usize>]) {
        for (v, succ) in self.vertices.iter().zip(&self.choices) {
            let k = succ.len() as u64;
            choice[*v] = Some(succ[(index % k) as usize]);
            index /= k;
        }
    }

    fn strategy(&self, player: Player, n: usize, index: u64) -> Strategy {
        let mut choice = vec![None; n];
        self.fill(index, &mut choice);
        Strategy::from_pairs(
            player,
            n,
            choice.iter().enumerate().filter_map(|(v, c)| c.map(|w| (v, w))),
        )
    }
}

fn pointwise_min(acc: &mut Vec<Rational>, x: Vec<Rational>) {
    if acc.is_empty() {
        *acc = x;
    } else {
        for (a, b) in acc.iter_mut().zip(x) {
            if b < *a {
                *a = b;
            }
        }
    }
}

/// Exact values by enumerating every pure memoryless strategy pair.
pub fn brute_force_with(g: &Game, opts: &SolveOptions) -> Result<BruteResult> {
    require_parity(g)?;
    g.validate().map_err(|e| Error::InvalidGame(Box::new(e)))?;
    if profile_count(g) > opts.brute_cap {
        return Err(Error::TooLarge { bound: opts.brute_cap });
    }
    opts.check()?;
    let n = g.num_vertices();
    let e0 = Enumerator::new(g, Owner::P0);
    let e1 = Enumerator::new(g, Owner::P1);

    let value_of = |i0: u64, i1: u64| {
        let mut choice = vec![None; n];
        e0.fill(i0, &mut choice);
        e1.fill(i1, &mut choice);
        chain_parity_values(
            &Chain {
                game: g,
                choice: &choice,
            },
            0,
        )
    };

    // For each f0: the pointwise minimum over f1 and the first f1 attaining it.
    let per_f0: Vec<(Vec<Rational>, u64)> = (0..e0.count)
        .into_par_iter()
        .map(|i0| -> Result<(Vec<Rational>, u64)> {
            opts.check()?;
            let mut min = Vec::new();
            let mut seen = Vec::with_capacity(e1.count.min(4096) as usize);
            for i1 in 0..e1.count {
                let x = value_of(i0, i1);
                if e1.count <= 4096 {
                    seen.push(x.clone());
                }
                pointwise_min(&mut min, x);
            }
            let best = if e1.count <= 4096 {
                seen.iter().position(|x| *x == min).map(|i| i as u64)
            } else {
                (0..e1.count).find(|&i1| value_of(i0, i1) == min)
            };
            Ok((min, best.expect("an MDP has a uniformly optimal memoryless strategy")))
        })
        .collect::<Result<_>>()?;

    let mut value = per_f0[0].0.clone();
    for (x, _) in &per_f0[1..] {
        for (a, b) in value.iter_mut().zip(x) {
            if b > a {
                *a = b.clone();
            }
        }
    }
    let (i0, flagged) = match per_f0.iter().position(|(x, _)| *x == value) {
        Some(i) => (i, false),
        None => (
            per_f0
                .iter()
                .position(|(x, _)| n == 0 || x[0] == value[0])
                .expect("maximum is attained"),
            true,
        ),
    };
    let i1 = per_f0[i0].1;
    Ok(BruteResult {
        values: ValueVector(value),
        strategy0: e0.strategy(Player::P0, n, i0 as u64),
        strategy1: e1.strategy(Player::P1, n, i1),
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{restrict_vertices, GameBuilder};
    use crate::gen::{example_pe, example_px};
    use crate::rational::rat;

    #[test]
    fn pe_attractor() {
        let g = example_pe();
        let attr = positive_attractor(&g, Player::P0, &RegionSet::from_ids(6, [4]));
        assert_eq!(attr.to_vec(), vec![0, 1, 2, 3, 4]);
        assert!(positive_attractor(&g, Player::P0, &RegionSet::empty(6)).is_empty());
        assert_eq!(positive_attractor(&g, Player::P0, &RegionSet::full(6)).len(), 6);
    }

    #[test]
    fn pe_regions() {
        let g = example_pe();
        for engine in [QualiEngine::Recursive, QualiEngine::BruteForce, QualiEngine::Auto] {
            let r = quali_solve_with(&g, &SolveOptions::default().with_engine(engine)).unwrap();
            assert_eq!(r.w0.to_vec(), vec![4], "{engine:?}");
            assert_eq!(r.w1.to_vec(), vec![5], "{engine:?}");
        }
    }

    #[test]
    fn px_recursion_region() {
        let g = example_px();
        let sub = restrict_vertices(&g, &RegionSet::from_ids(9, [5, 6, 8]));
        sub.game.validate().unwrap();
        let r = quali_solve(&sub.game).unwrap();
        let won: Vec<usize> = r.w0.iter().map(|v| sub.origin[v]).collect();
        assert_eq!(won, vec![5, 6]);
        // v3 (local 1) must move to v2 (local 0).
        assert_eq!(r.witness.choice(1), Some(0));
    }

    #[test]
    fn pe_brute_force() {
        let (val, f0, f1) = brute_force_values(&example_pe()).unwrap();
        let expect = [rat(19, 20), rat(19, 20), rat(11, 20), rat(19, 20), rat(1, 1), rat(0, 1)];
        assert_eq!(val.0, expect);
        assert_eq!(f0.choice(0), Some(1));
        assert_eq!(f1.choice(1), Some(3));
    }

    #[test]
    fn px_brute_force() {
        let (val, _, _) = brute_force_values(&example_px()).unwrap();
        assert_eq!(val[0], rat(19, 20));
        assert_eq!(val[1], rat(19, 20));
        assert_eq!(val[2], rat(11, 20));
        assert_eq!(val[3], rat(19, 20));
        assert_eq!(val[5], rat(1, 2));
        assert_eq!(val[6], rat(1, 2));
    }

    #[test]
    fn self_loop_brute_force() {
        let mut b = GameBuilder::parity();
        let v = b.vertex(Owner::Random, 0, "a");
        b.wedge(v, v, rat(1, 1));
        let (val, f0, f1) = brute_force_values(&b.build().unwrap()).unwrap();
        assert_eq!(val.0, vec![rat(1, 1)]);
        assert!(f0.is_empty() && f1.is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let opts = SolveOptions {
            brute_cap: 3,
            ..SolveOptions::default()
        };
        assert_eq!(
            brute_force_with(&example_pe(), &opts),
            Err(Error::TooLarge { bound: 3 })
        );
    }
}

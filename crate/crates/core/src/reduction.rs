//! Parity-to-reachability gadget and the exact oracle built on it.
//!
//! Every vertex `v` gets a random primed copy `v'`; edges `u -> v` become
//! `u -> v'`, and `v'` continues to `v` except for a `δ^(c+1)` chance of
//! jumping to `won` (priority `c` even) or `lost` (odd). For small enough δ,
//! optimal reachability strategies of the gadget are optimal parity
//! strategies of the original game.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::eval::{parity_values, Mode};
use crate::game::{induced_mc, induced_mdp, Game, GameBuilder, Kind, Owner, Player};
use crate::improve::SolveReport;
use crate::options::SolveOptions;
use crate::rational::{height, Rational};
use crate::reach::reach_solve_with;
use crate::strategy::{Strategy, ValueVector};

#[derive(Clone, Debug)]
pub struct GadgetGame {
    /// Reachability game with target `{won}`.
    pub game: Game,
    /// `primed_of[v]` is the primed copy of original vertex `v`.
    pub primed_of: Vec<usize>,
    pub won: usize,
    pub lost: usize,
    pub delta: Rational,
    /// Number of vertices of the original game.
    pub original: usize,
}

/// Builds the gadget. Original vertices keep their ids `0..n`, primed copies
/// are `n..2n`, then `won = 2n` and `lost = 2n + 1`. Zero-weight edges (when
/// `δ = 1`) are left out so every random edge stays strictly positive.
pub fn build_gadget(g: &Game, delta: &Rational) -> Result<GadgetGame> {
    if g.kind() != Kind::Parity {
        return Err(Error::WrongKind { expected: "parity" });
    }
    if !delta.is_positive() || *delta > Rational::one() {
        return Err(Error::BadDelta);
    }
    let n = g.num_vertices();
    let mut b = GameBuilder::reach();
    for v in 0..n {
        let name = g.name(v);
        b.add_vertex(g.owner(v), None, name);
    }
    for v in 0..n {
        let name = g.name(v).map(|s| format!("{s}'"));
        b.add_vertex(Owner::Random, None, name.as_deref());
    }
    let won = b.add_vertex(Owner::Random, None, Some("won"));
    let lost = b.add_vertex(Owner::Random, None, Some("lost"));
    for v in 0..n {
        for (w, p) in g.edges(v) {
            b.add_edge(v, n + w, p.cloned());
        }
    }
    for v in 0..n {
        let c = g.priority(v);
        let jump = delta.pow((c + 1) as i32);
        let stay = Rational::one() - &jump;
        if !stay.is_zero() {
            b.wedge(n + v, v, stay);
        }
        let sink = if c.is_multiple_of(2) { won } else { lost };
        b.wedge(n + v, sink, jump);
    }
    b.wedge(won, won, Rational::one());
    b.wedge(lost, lost, Rational::one());
    b.set_target([won]);
    Ok(GadgetGame {
        game: b.build()?,
        primed_of: (n..2 * n).collect(),
        won,
        lost,
        delta: delta.clone(),
        original: n,
    })
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(n!^2 · 2^(2n+3) · M^(2n^2))^-1` with `M` the largest numerator or
/// denominator among edge probabilities, at least 2.
pub fn andersson_delta(g: &Game) -> Rational {
    let n = g.num_vertices();
    let mut m = BigInt::from(2);
    for v in 0..n {
        for (_, p) in g.edges(v) {
            if let Some(p) = p {
                let h = height(p);
                if h > m {
                    m = h;
                }
            }
        }
    }
    let f = factorial(n);
    let denom = &f * &f * Pow::pow(BigInt::from(2), (2 * n + 3) as u32) * Pow::pow(m, (2 * n * n) as u32);
    Rational::new(BigInt::one(), denom)
}

/// Strategy on the original game that is similar to `f` on the gadget.
pub fn lift_strategy(gg: &GadgetGame, f: &Strategy) -> Result<Strategy> {
    let n = gg.original;
    let mut out = Strategy::empty(f.player, n);
    for (v, w) in f.pairs() {
        if v >= n {
            continue;
        }
        if !(n..2 * n).contains(&w) {
            return Err(Error::NotAPrimedTarget(v));
        }
        out.set(v, w - n);
    }
    Ok(out)
}

pub fn oracle_solve_via_reduction(g: &Game) -> Result<SolveReport> {
    oracle_solve_with(g, &SolveOptions::default())
}

/// Solves the gadget game, lifts both strategies, recomputes the exact
/// parity values of the lifted pair, and certifies that neither player can
/// improve on them.
pub fn oracle_solve_with(g: &Game, opts: &SolveOptions) -> Result<SolveReport> {
    g.validate().map_err(|e| Error::InvalidGame(Box::new(e)))?;
    if g.num_vertices() > opts.reduction_cap {
        return Err(Error::TooLarge {
            bound: opts.reduction_cap as u64,
        });
    }
    let delta = andersson_delta(g);
    let gg = build_gadget(g, &delta)?;
    let target = gg.game.target().expect("gadget has a target").clone();
    let r = reach_solve_with(&gg.game, &target, opts)?;
    let f0 = lift_strategy(&gg, &r.strategy0)?;
    let f1 = lift_strategy(&gg, &r.strategy1)?;
    let mc = induced_mc(g, &f0, &f1)?;
    let values = ValueVector(crate::eval::mc_parity_value(&mc)?.0);

    let (best1, _) = parity_values(&induced_mdp(g, &f0)?, Owner::P1, Mode::Minimize, None);
    let (best0, _) = parity_values(&induced_mdp(g, &f1)?, Owner::P0, Mode::Maximize, None);
    if best1 != values.0 || best0 != values.0 {
        return Err(Error::NotMutuallyOptimal);
    }
    debug_assert_eq!(f0.player, Player::P0);
    Ok(SolveReport {
        values,
        strategy0: f0,
        strategy1: f1,
        outer_iterations: r.iterations,
        profitable_rounds: r.iterations,
        neutral_rounds: 0,
        trace: None,
    })
}

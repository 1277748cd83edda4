//! Exact evaluation of Markov chains and single-controller games (MDPs).

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{even_min_wins, Game, Kind, Owner, Player};
use crate::graph::{backward_bfs, sccs};
use crate::linear::{absorption_values, Chain};
use crate::rational::Rational;
use crate::region::RegionSet;
use crate::strategy::{Strategy, ValueVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Maximize,
    Minimize,
}

/// Disjoint vertex sets: bottom SCCs of a chain, or maximal end components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcDecomposition {
    pub components: Vec<Vec<usize>>,
}

impl EcDecomposition {
    pub fn region(&self, n: usize) -> RegionSet {
        RegionSet::from_ids(n, self.components.iter().flatten().copied())
    }
}

fn require_mc(g: &Game) -> Result<()> {
    if g.is_mc() {
        Ok(())
    } else {
        Err(Error::NotAnMC)
    }
}

fn require_parity(g: &Game) -> Result<()> {
    match g.kind() {
        Kind::Parity => Ok(()),
        Kind::Reach => Err(Error::WrongKind { expected: "parity" }),
    }
}

/// Bottom SCCs of a chain, sorted by smallest member.
pub(crate) fn chain_bsccs(chain: &Chain<'_>) -> Vec<Vec<usize>> {
    let n = chain.game.num_vertices();
    let comps = sccs(&RegionSet::full(n), |v, out| chain.push_successors(v, out));
    let mut comp_of = vec![0usize; n];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut buf = Vec::new();
    let mut out: Vec<Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            c.iter().all(|&v| {
                buf.clear();
                chain.push_successors(v, &mut buf);
                buf.iter().all(|&w| comp_of[w] == *i)
            })
        })
        .map(|(_, c)| c.clone())
        .collect();
    out.sort();
    out
}

pub fn mc_bsccs(mc: &Game) -> Result<EcDecomposition> {
    require_mc(mc)?;
    let choice = vec![None; mc.num_vertices()];
    Ok(EcDecomposition {
        components: chain_bsccs(&Chain {
            game: mc,
            choice: &choice,
        }),
    })
}

/// Parity values of the chain; `shift` is added to every priority.
pub(crate) fn chain_parity_values(chain: &Chain<'_>, shift: u32) -> Vec<Rational> {
    let g = chain.game;
    let n = g.num_vertices();
    let mut accepting = RegionSet::empty(n);
    let mut pinned: Vec<Option<Rational>> = vec![None; n];
    for comp in chain_bsccs(chain) {
        let min = comp.iter().map(|&v| g.priority(v) + shift).min().expect("nonempty");
        let win = even_min_wins(min);
        for &v in &comp {
            if win {
                accepting.insert(v);
                pinned[v] = Some(Rational::one());
            } else {
                pinned[v] = Some(Rational::zero());
            }
        }
    }
    zero_unreachable(chain, &accepting, &mut pinned);
    absorption_values(chain, &pinned)
}

/// Pins to 0 every unpinned vertex that cannot reach `good` in the chain.
fn zero_unreachable(chain: &Chain<'_>, good: &RegionSet, pinned: &mut [Option<Rational>]) {
    let n = chain.game.num_vertices();
    let mut pred = vec![Vec::new(); n];
    let mut buf = Vec::new();
    for v in 0..n {
        buf.clear();
        chain.push_successors(v, &mut buf);
        for &w in &buf {
            pred[w].push(v);
        }
    }
    let dist = backward_bfs(&RegionSet::full(n), good, &pred);
    for v in 0..n {
        if dist[v].is_none() && pinned[v].is_none() {
            pinned[v] = Some(Rational::zero());
        }
    }
}

pub(crate) fn chain_reach_values(chain: &Chain<'_>, target: &RegionSet) -> Vec<Rational> {
    let n = chain.game.num_vertices();
    let mut pinned: Vec<Option<Rational>> = (0..n).map(|v| target.contains(v).then(Rational::one)).collect();
    zero_unreachable(chain, target, &mut pinned);
    absorption_values(chain, &pinned)
}

pub fn mc_parity_value(mc: &Game) -> Result<ValueVector> {
    require_mc(mc)?;
    require_parity(mc)?;
    let choice = vec![None; mc.num_vertices()];
    Ok(ValueVector(chain_parity_values(
        &Chain {
            game: mc,
            choice: &choice,
        },
        0,
    )))
}

pub fn mc_reach_value(mc: &Game, target: &RegionSet) -> Result<ValueVector> {
    require_mc(mc)?;
    check_universe(mc, target)?;
    let choice = vec![None; mc.num_vertices()];
    Ok(ValueVector(chain_reach_values(
        &Chain {
            game: mc,
            choice: &choice,
        },
        target,
    )))
}

fn check_universe(g: &Game, set: &RegionSet) -> Result<()> {
    if set.universe() != g.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.num_vertices(),
            found: set.universe(),
        });
    }
    Ok(())
}

fn default_player(g: &Game, mode: Mode) -> Result<Player> {
    Ok(g.controller()?.unwrap_or(match mode {
        Mode::Maximize => Player::P0,
        Mode::Minimize => Player::P1,
    }))
}

fn into_strategy(player: Player, choice: Vec<Option<usize>>) -> Strategy {
    Strategy::from_pairs(
        player,
        choice.len(),
        choice.iter().enumerate().filter_map(|(v, c)| c.map(|w| (v, w))),
    )
}

/// Optimal reachability values of an MDP and an optimal memoryless strategy
/// for its controller. Target vertices count as absorbing.
pub fn mdp_reach(mdp: &Game, target: &RegionSet, mode: Mode) -> Result<(ValueVector, Strategy)> {
    check_universe(mdp, target)?;
    let player = default_player(mdp, mode)?;
    let (x, choice) = reach_policy_iteration(mdp, target, mode, player.owner(), None);
    Ok((ValueVector(x), into_strategy(player, choice)))
}

/// Policy iteration for reachability with one controller `ctl`. Returns the
/// value vector and a choice for every `ctl` vertex. `warm` seeds the policy.
pub(crate) fn reach_policy_iteration(
    g: &Game,
    target: &RegionSet,
    mode: Mode,
    ctl: Owner,
    warm: Option<&[Option<usize>]>,
) -> (Vec<Rational>, Vec<Option<usize>>) {
    let n = g.num_vertices();
    let mut pinned: Vec<Option<Rational>> = vec![None; n];
    let mut choice: Vec<Option<usize>> = vec![None; n];
    for v in target.iter() {
        pinned[v] = Some(Rational::one());
    }
    let smallest = |v: usize| *g.successors(v).iter().min().expect("sinkless");
    let is_ctl = |v: usize| g.owner(v) == ctl;

    match mode {
        Mode::Maximize => {
            let dist = backward_bfs(&RegionSet::full(n), target, &g.predecessors());
            for v in 0..n {
                if target.contains(v) {
                    if is_ctl(v) {
                        choice[v] = Some(smallest(v));
                    }
                    continue;
                }
                match dist[v] {
                    None => {
                        pinned[v] = Some(Rational::zero());
                        if is_ctl(v) {
                            choice[v] = Some(smallest(v));
                        }
                    }
                    Some(d) if is_ctl(v) => {
                        let down = g
                            .successors(v)
                            .iter()
                            .copied()
                            .filter(|&w| dist[w] == Some(d - 1))
                            .min()
                            .expect("bfs predecessor");
                        choice[v] = Some(down);
                    }
                    Some(_) => {}
                }
            }
            if let Some(warm) = warm {
                adopt_proper_warm_start(g, target, &pinned, &mut choice, warm, ctl);
            }
        }
        Mode::Minimize => {
            let avoid = avoid_region(g, target, ctl);
            for v in 0..n {
                if !is_ctl(v) {
                    if avoid.contains(v) {
                        pinned[v] = Some(Rational::zero());
                    }
                    continue;
                }
                if avoid.contains(v) {
                    pinned[v] = Some(Rational::zero());
                    let stay = g.successors(v).iter().copied().filter(|&w| avoid.contains(w)).min();
                    choice[v] = Some(stay.expect("avoid region is closed"));
                } else {
                    let seeded = warm
                        .and_then(|w| w.get(v).copied().flatten())
                        .filter(|&w| g.has_edge(v, w));
                    choice[v] = Some(seeded.unwrap_or_else(|| smallest(v)));
                }
            }
        }
    }

    loop {
        let x = absorption_values(
            &Chain {
                game: g,
                choice: &choice,
            },
            &pinned,
        );
        let mut changed = false;
        for v in 0..n {
            if !is_ctl(v) || pinned[v].is_some() {
                continue;
            }
            let cur = choice[v].expect("controller has a choice");
            let mut best = cur;
            for &w in g.successors(v) {
                let better = match mode {
                    Mode::Maximize => x[w] > x[best] || (x[w] == x[best] && w < best && x[w] > x[cur]),
                    Mode::Minimize => x[w] < x[best] || (x[w] == x[best] && w < best && x[w] < x[cur]),
                };
                if better {
                    best = w;
                }
            }
            if best != cur {
                choice[v] = Some(best);
                changed = true;
            }
        }
        if !changed {
            return (x, choice);
        }
    }
}

/// Keeps the warm choices at vertices from which they still reach the target
/// (with positive probability); other vertices keep the distance-decreasing
/// default, so the combined policy stays proper.
fn adopt_proper_warm_start(
    g: &Game,
    target: &RegionSet,
    pinned: &[Option<Rational>],
    choice: &mut [Option<usize>],
    warm: &[Option<usize>],
    ctl: Owner,
) {
    let n = g.num_vertices();
    let mut trial = choice.to_vec();
    for v in 0..n {
        if g.owner(v) == ctl && pinned[v].is_none() {
            if let Some(w) = warm.get(v).copied().flatten().filter(|&w| g.has_edge(v, w)) {
                trial[v] = Some(w);
            }
        }
    }
    let chain = Chain {
        game: g,
        choice: &trial,
    };
    let mut pred = vec![Vec::new(); n];
    let mut buf = Vec::new();
    for v in 0..n {
        if target.contains(v) {
            continue;
        }
        buf.clear();
        chain.push_successors(v, &mut buf);
        for &w in &buf {
            pred[w].push(v);
        }
    }
    let reach = backward_bfs(&RegionSet::full(n), target, &pred);
    for v in 0..n {
        if g.owner(v) == ctl && pinned[v].is_none() && reach[v].is_some() {
            choice[v] = trial[v];
        }
    }
}

/// Greatest set outside `target` in which the controller can stay forever:
/// random vertices need all successors inside, controller vertices one.
fn avoid_region(g: &Game, target: &RegionSet, ctl: Owner) -> RegionSet {
    let n = g.num_vertices();
    let mut inside = target.complement();
    let pred = g.predecessors();
    // Number of successors currently outside the region.
    let mut outside: Vec<usize> = (0..n)
        .map(|v| g.successors(v).iter().filter(|&&w| !inside.contains(w)).count())
        .collect();
    let leaves = |v: usize, outside: &[usize]| {
        if g.owner(v) == ctl {
            outside[v] == g.out_degree(v)
        } else {
            outside[v] > 0
        }
    };
    let mut stack: Vec<usize> = (0..n).filter(|&v| inside.contains(v) && leaves(v, &outside)).collect();
    while let Some(v) = stack.pop() {
        if !inside.contains(v) {
            continue;
        }
        inside.remove(v);
        for &u in &pred[v] {
            outside[u] += 1;
            if inside.contains(u) && leaves(u, &outside) {
                stack.push(u);
            }
        }
    }
    inside
}

/// Maximal end components inside `alive`, where `ctl` vertices choose and all
/// other vertices are random.
pub(crate) fn mecs(g: &Game, alive: &RegionSet, ctl: Owner) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut alive = alive.clone();
    let mut comp_of = vec![usize::MAX; n];
    loop {
        let comps = sccs(&alive, |v, out| out.extend_from_slice(g.successors(v)));
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let doomed: Vec<usize> = alive
            .iter()
            .filter(|&v| {
                let same = |w: &usize| alive.contains(*w) && comp_of[*w] == comp_of[v];
                if g.owner(v) == ctl {
                    !g.successors(v).iter().any(same)
                } else {
                    !g.successors(v).iter().all(same)
                }
            })
            .collect();
        if doomed.is_empty() {
            let mut out: Vec<Vec<usize>> = comps.into_iter().collect();
            out.sort();
            return out;
        }
        for v in doomed {
            alive.remove(v);
            comp_of[v] = usize::MAX;
        }
    }
}

pub fn mdp_mecs(mdp: &Game) -> Result<EcDecomposition> {
    let player = mdp.controller()?.unwrap_or(Player::P0);
    Ok(EcDecomposition {
        components: mecs(mdp, &RegionSet::full(mdp.num_vertices()), player.owner()),
    })
}

/// Parity values of an MDP. Maximize: the controller maximises the chance
/// that the least recurring priority is even. Minimize: it minimises it,
/// computed as one minus the maximal chance of the shifted condition.
pub fn mdp_parity_value(mdp: &Game, mode: Mode) -> Result<(ValueVector, Strategy)> {
    require_parity(mdp)?;
    let player = default_player(mdp, mode)?;
    let (x, choice) = parity_values(mdp, player.owner(), mode, None);
    Ok((ValueVector(x), into_strategy(player, choice)))
}

pub(crate) fn parity_values(
    g: &Game,
    ctl: Owner,
    mode: Mode,
    warm: Option<&[Option<usize>]>,
) -> (Vec<Rational>, Vec<Option<usize>>) {
    match mode {
        Mode::Maximize => parity_max(g, ctl, 0, warm),
        Mode::Minimize => {
            let (x, choice) = parity_max(g, ctl, 1, warm);
            (x.into_iter().map(|v| Rational::one() - v).collect(), choice)
        }
    }
}

/// Maximal probability of the parity condition with priorities raised by
/// `shift`: reach the union of end components whose least priority is even,
/// then stay there visiting that priority infinitely often.
fn parity_max(g: &Game, ctl: Owner, shift: u32, warm: Option<&[Option<usize>]>) -> (Vec<Rational>, Vec<Option<usize>>) {
    let n = g.num_vertices();
    let pri = |v: usize| g.priority(v) + shift;
    let max_p = (0..n).map(pri).max().unwrap_or(0);
    let mut win = RegionSet::empty(n);
    let mut inner: Vec<Option<usize>> = vec![None; n];
    let mut level = 0;
    while level <= max_p {
        let alive = RegionSet::from_predicate(n, |v| pri(v) >= level && !win.contains(v));
        if !alive.is_empty() {
            for m in mecs(g, &alive, ctl) {
                let members = RegionSet::from_ids(n, m.iter().copied());
                let goal = RegionSet::from_ids(n, m.iter().copied().filter(|&v| pri(v) == level));
                if goal.is_empty() {
                    continue;
                }
                // Stay inside the component, steering towards `goal`.
                let mut pred = vec![Vec::new(); n];
                for &v in &m {
                    for &w in g.successors(v) {
                        if members.contains(w) {
                            pred[w].push(v);
                        }
                    }
                }
                let dist = backward_bfs(&members, &goal, &pred);
                for &v in &m {
                    if g.owner(v) != ctl {
                        continue;
                    }
                    let inside = g.successors(v).iter().copied().filter(|&w| members.contains(w));
                    let pick = match dist[v] {
                        Some(0) | None => inside.min(),
                        Some(d) => inside.filter(|&w| dist[w] == Some(d - 1)).min(),
                    };
                    inner[v] = Some(pick.expect("end component keeps an internal edge"));
                }
                win.union_with(&members);
            }
        }
        level += 2;
    }
    let (x, mut choice) = reach_policy_iteration(g, &win, Mode::Maximize, ctl, warm);
    for v in win.iter() {
        if inner[v].is_some() {
            choice[v] = inner[v];
        }
    }
    (x, choice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{induced_mc, induced_mdp, GameBuilder};
    use crate::gen::example_pe;
    use crate::rational::rat;

    fn pe_pair(c0: usize, c1: usize) -> (Strategy, Strategy) {
        (
            Strategy::from_pairs(Player::P0, 6, [(0, c0)]),
            Strategy::from_pairs(Player::P1, 6, [(1, c1)]),
        )
    }

    #[test]
    fn pe_chain_values() {
        let g = example_pe();
        let (f0, f1) = pe_pair(2, 0);
        let mc = induced_mc(&g, &f0, &f1).unwrap();
        assert_eq!(mc_bsccs(&mc).unwrap().components, vec![vec![4], vec![5]]);
        let val = mc_parity_value(&mc).unwrap();
        assert_eq!(val[0], rat(11, 20));
        assert_eq!(val[1], rat(11, 20));

        let (f0, f1) = pe_pair(1, 3);
        let val = mc_parity_value(&induced_mc(&g, &f0, &f1).unwrap()).unwrap();
        assert_eq!(val[0], rat(19, 20));

        let (f0, f1) = pe_pair(1, 0);
        let mc = induced_mc(&g, &f0, &f1).unwrap();
        assert_eq!(mc_bsccs(&mc).unwrap().components, vec![vec![0, 1], vec![4], vec![5]]);
        assert_eq!(mc_parity_value(&mc).unwrap()[0], rat(1, 1));
    }

    #[test]
    fn pe_chain_reach() {
        let g = example_pe();
        let (f0, f1) = pe_pair(2, 0);
        let mc = induced_mc(&g, &f0, &f1).unwrap();
        let t = RegionSet::from_ids(6, [4]);
        assert_eq!(mc_reach_value(&mc, &t).unwrap()[0], rat(11, 20));
        let all = mc_reach_value(&mc, &RegionSet::full(6)).unwrap();
        assert!(all.iter().all(|x| *x == rat(1, 1)));
        assert_eq!(mc_reach_value(&mc, &t).unwrap()[5], rat(0, 1));
    }

    #[test]
    fn pe_mdp_reach_minimize() {
        let g = example_pe();
        let f0 = Strategy::from_pairs(Player::P0, 6, [(0, 2)]);
        let mdp = induced_mdp(&g, &f0).unwrap();
        let (val, f1) = mdp_reach(&mdp, &RegionSet::from_ids(6, [4]), Mode::Minimize).unwrap();
        assert_eq!(val[1], rat(11, 20));
        assert_eq!(f1.choice(1), Some(0));
        assert_eq!(f1.player, Player::P1);
    }

    #[test]
    fn pe_mdp_parity_minimize() {
        let g = example_pe();
        let f0 = Strategy::from_pairs(Player::P0, 6, [(0, 1)]);
        let mdp = induced_mdp(&g, &f0).unwrap();
        let (val, f1) = mdp_parity_value(&mdp, Mode::Minimize).unwrap();
        assert_eq!(val[0], rat(19, 20));
        assert_eq!(f1.choice(1), Some(3));
    }

    #[test]
    fn mec_of_cycle_and_self_loops() {
        let g = example_pe();
        let f0 = Strategy::from_pairs(Player::P0, 6, [(0, 1)]);
        let mdp = induced_mdp(&g, &f0).unwrap();
        assert_eq!(mdp_mecs(&mdp).unwrap().components, vec![vec![0, 1], vec![4], vec![5]]);
    }

    #[test]
    fn single_vertex_games() {
        let mut b = GameBuilder::parity();
        let v = b.vertex(Owner::Random, 0, "a");
        b.wedge(v, v, rat(1, 1));
        let g = b.build().unwrap();
        assert_eq!(mc_parity_value(&g).unwrap().0, vec![rat(1, 1)]);
        let (val, f) = mdp_parity_value(&g, Mode::Maximize).unwrap();
        assert_eq!(val.0, vec![rat(1, 1)]);
        assert!(f.is_empty());
    }

    #[test]
    fn chain_to_target_maximize() {
        let mut b = GameBuilder::reach();
        let a = b.add_vertex(Owner::Random, None, None);
        let t = b.add_vertex(Owner::Random, None, None);
        b.wedge(a, t, rat(1, 1)).wedge(t, t, rat(1, 1));
        b.set_target([t]);
        let g = b.build().unwrap();
        let (val, f) = mdp_reach(&g, g.target().unwrap(), Mode::Maximize).unwrap();
        assert_eq!(val.0, vec![rat(1, 1), rat(1, 1)]);
        assert!(f.is_empty());
    }

    #[test]
    fn not_an_mc() {
        assert_eq!(mc_parity_value(&example_pe()), Err(Error::NotAnMC));
        assert_eq!(
            mdp_parity_value(&example_pe(), Mode::Maximize).unwrap_err(),
            Error::TwoControlledPlayers
        );
    }
}

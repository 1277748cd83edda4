//! Arenas, parity and reachability games, and the derived views used by the
//! solvers (induced MDPs and MCs, restrictions, switch classification).
//!
//! Parity conditions use the *min* convention throughout: a play is won by
//! Player 0 iff the least priority seen infinitely often is even. The single
//! place that encodes this is [`even_min_wins`].

use num_traits::{One, Signed, Zero};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::region::{EdgeSet, RegionSet};
use crate::strategy::{Strategy, ValueVector};

/// Whether Player 0 wins a play whose least infinitely-recurring priority is `p`.
#[inline]
pub fn even_min_wins(p: u32) -> bool {
    p.is_multiple_of(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    P0,
    P1,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    P0,
    P1,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P0 => Player::P1,
            Player::P1 => Player::P0,
        }
    }

    pub fn owner(self) -> Owner {
        match self {
            Player::P0 => Owner::P0,
            Player::P1 => Owner::P1,
        }
    }
}

impl Owner {
    pub fn player(self) -> Option<Player> {
        match self {
            Owner::P0 => Some(Player::P0),
            Owner::P1 => Some(Player::P1),
            Owner::Random => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Parity,
    Reach,
}

/// An immutable game in compressed adjacency form. Successor lists keep the
/// order in which edges were added.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    kind: Kind,
    owner: Vec<Owner>,
    priority: Vec<Option<u32>>,
    name: Vec<Option<String>>,
    offsets: Vec<usize>,
    succ: Vec<usize>,
    weight: Vec<Option<Rational>>,
    target: Option<RegionSet>,
}

#[derive(Clone, Debug, Default)]
struct VertexSpec {
    owner: Option<Owner>,
    priority: Option<u32>,
    name: Option<String>,
}

/// Mutable builder; `build` only checks that edges name existing vertices.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    kind: Kind,
    vertices: Vec<VertexSpec>,
    edges: Vec<(usize, usize, Option<Rational>)>,
    target: Option<Vec<usize>>,
}

impl GameBuilder {
    pub fn new(kind: Kind) -> Self {
        GameBuilder {
            kind,
            vertices: Vec::new(),
            edges: Vec::new(),
            target: None,
        }
    }

    pub fn parity() -> Self {
        Self::new(Kind::Parity)
    }

    pub fn reach() -> Self {
        Self::new(Kind::Reach)
    }

    pub fn add_vertex(&mut self, owner: Owner, priority: Option<u32>, name: Option<&str>) -> usize {
        self.vertices.push(VertexSpec {
            owner: Some(owner),
            priority,
            name: name.map(str::to_owned),
        });
        self.vertices.len() - 1
    }

    /// Convenience for parity games.
    pub fn vertex(&mut self, owner: Owner, priority: u32, name: &str) -> usize {
        self.add_vertex(owner, Some(priority), Some(name))
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: Option<Rational>) -> &mut Self {
        self.edges.push((from, to, weight));
        self
    }

    /// Controlled edge (no weight).
    pub fn edge(&mut self, from: usize, to: usize) -> &mut Self {
        self.add_edge(from, to, None)
    }

    /// Random edge with a weight.
    pub fn wedge(&mut self, from: usize, to: usize, weight: Rational) -> &mut Self {
        self.add_edge(from, to, Some(weight))
    }

    pub fn set_target<I: IntoIterator<Item = usize>>(&mut self, ids: I) -> &mut Self {
        self.target = Some(ids.into_iter().collect());
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn build(self) -> Result<Game> {
        let n = self.vertices.len();
        let mut buckets: Vec<Vec<(usize, Option<Rational>)>> = vec![Vec::new(); n];
        for (from, to, w) in self.edges {
            if from >= n {
                return Err(Error::UnknownVertex(from));
            }
            if to >= n {
                return Err(Error::UnknownVertex(to));
            }
            buckets[from].push((to, w));
        }
        let target = match self.target {
            Some(ids) => {
                if let Some(&bad) = ids.iter().find(|&&v| v >= n) {
                    return Err(Error::UnknownVertex(bad));
                }
                Some(RegionSet::from_ids(n, ids))
            }
            None => None,
        };
        let mut owner = Vec::with_capacity(n);
        let mut priority = Vec::with_capacity(n);
        let mut name = Vec::with_capacity(n);
        for v in self.vertices {
            owner.push(v.owner.unwrap_or(Owner::Random));
            priority.push(v.priority);
            name.push(v.name);
        }
        Ok(Game::assemble(self.kind, owner, priority, name, buckets, target))
    }
}

impl Game {
    fn assemble(
        kind: Kind,
        owner: Vec<Owner>,
        priority: Vec<Option<u32>>,
        name: Vec<Option<String>>,
        adjacency: Vec<Vec<(usize, Option<Rational>)>>,
        target: Option<RegionSet>,
    ) -> Game {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        let total: usize = adjacency.iter().map(Vec::len).sum();
        let mut succ = Vec::with_capacity(total);
        let mut weight = Vec::with_capacity(total);
        offsets.push(0);
        for list in adjacency {
            for (w, p) in list {
                succ.push(w);
                weight.push(p);
            }
            offsets.push(succ.len());
        }
        Game {
            kind,
            owner,
            priority,
            name,
            offsets,
            succ,
            weight,
            target,
        }
    }

    /// Rebuilds the game vertex by vertex, keeping ids, names and priorities.
    fn remap<F>(&self, mut f: F) -> Game
    where
        F: FnMut(usize) -> (Owner, Vec<(usize, Option<Rational>)>),
    {
        let n = self.num_vertices();
        let mut owner = Vec::with_capacity(n);
        let mut adjacency = Vec::with_capacity(n);
        for v in 0..n {
            let (o, edges) = f(v);
            owner.push(o);
            adjacency.push(edges);
        }
        Game::assemble(
            self.kind,
            owner,
            self.priority.clone(),
            self.name.clone(),
            adjacency,
            self.target.clone(),
        )
    }

    fn edge_list(&self, v: usize) -> Vec<(usize, Option<Rational>)> {
        self.edge_range(v)
            .map(|e| (self.succ[e], self.weight[e].clone()))
            .collect()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len()
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.owner[v]
    }

    /// Priority of `v`; panics on a parity game vertex without priority, which
    /// validation rules out.
    pub fn priority(&self, v: usize) -> u32 {
        self.priority[v].expect("vertex without priority")
    }

    pub fn priority_opt(&self, v: usize) -> Option<u32> {
        self.priority[v]
    }

    pub fn name(&self, v: usize) -> Option<&str> {
        self.name[v].as_deref()
    }

    /// Name if present, otherwise the numeric id.
    pub fn label(&self, v: usize) -> String {
        match self.name(v) {
            Some(s) => s.to_owned(),
            None => v.to_string(),
        }
    }

    /// Looks a vertex up by name.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.name.iter().position(|n| n.as_deref() == Some(name))
    }

    pub fn target(&self) -> Option<&RegionSet> {
        self.target.as_ref()
    }

    pub fn edge_range(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[self.edge_range(v)]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(successor, weight)` pairs of `v`.
    pub fn edges(&self, v: usize) -> impl Iterator<Item = (usize, Option<&Rational>)> + '_ {
        self.edge_range(v).map(move |e| (self.succ[e], self.weight[e].as_ref()))
    }

    pub fn edge_target(&self, e: usize) -> usize {
        self.succ[e]
    }

    pub fn edge_source(&self, e: usize) -> usize {
        self.offsets.partition_point(|&o| o <= e) - 1
    }

    pub fn edge_weight(&self, e: usize) -> Option<&Rational> {
        self.weight[e].as_ref()
    }

    pub fn edge_index(&self, from: usize, to: usize) -> Option<usize> {
        if from >= self.num_vertices() {
            return None;
        }
        self.edge_range(from).find(|&e| self.succ[e] == to)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edge_index(from, to).is_some()
    }

    pub fn vertices_of(&self, owner: Owner) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(move |&v| self.owner[v] == owner)
    }

    pub fn has_owner(&self, owner: Owner) -> bool {
        self.owner.contains(&owner)
    }

    /// Number of distinct priorities.
    pub fn colours(&self) -> usize {
        let mut ps: Vec<u32> = self.priority.iter().flatten().copied().collect();
        ps.sort_unstable();
        ps.dedup();
        ps.len()
    }

    pub fn max_priority(&self) -> Option<u32> {
        self.priority.iter().flatten().copied().max()
    }

    /// Predecessor lists, one per vertex.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.num_vertices()];
        for v in 0..self.num_vertices() {
            for &w in self.successors(v) {
                pred[w].push(v);
            }
        }
        pred
    }

    /// The single controlling player of an MDP, if any.
    pub fn controller(&self) -> Result<Option<Player>> {
        match (self.has_owner(Owner::P0), self.has_owner(Owner::P1)) {
            (true, true) => Err(Error::TwoControlledPlayers),
            (true, false) => Ok(Some(Player::P0)),
            (false, true) => Ok(Some(Player::P1)),
            (false, false) => Ok(None),
        }
    }

    pub fn is_mc(&self) -> bool {
        self.owner.iter().all(|&o| o == Owner::Random)
    }

    pub fn validate(&self) -> Result<()> {
        validate_game(self)
    }

    /// Same arena with every priority raised by `k`.
    pub fn shift_priorities(&self, k: u32) -> Game {
        let mut g = self.clone();
        for p in g.priority.iter_mut().flatten() {
            *p += k;
        }
        g
    }

    /// The game seen from Player 1: owners swapped and priorities raised by
    /// one, so Player 0 of the dual wins exactly when Player 1 wins here.
    pub fn dual(&self) -> Game {
        let mut g = self.shift_priorities(1);
        for o in g.owner.iter_mut() {
            *o = match *o {
                Owner::P0 => Owner::P1,
                Owner::P1 => Owner::P0,
                Owner::Random => Owner::Random,
            };
        }
        g
    }

    /// Turns every vertex of `set` into a random vertex with a weight-1 self loop.
    pub fn make_absorbing(&self, set: &RegionSet) -> Game {
        self.remap(|v| {
            if set.contains(v) {
                (Owner::Random, vec![(v, Some(Rational::one()))])
            } else {
                (self.owner[v], self.edge_list(v))
            }
        })
    }

    /// Parity version of the arena with the given priorities.
    pub fn with_priorities(&self, priority: Vec<u32>) -> Game {
        assert_eq!(priority.len(), self.num_vertices());
        let mut g = self.clone();
        g.kind = Kind::Parity;
        g.priority = priority.into_iter().map(Some).collect();
        g.target = None;
        g
    }

    /// Reachability version of the arena with the given target.
    pub fn with_target(&self, target: RegionSet) -> Game {
        let mut g = self.clone();
        g.kind = Kind::Reach;
        g.target = Some(target);
        g
    }
}

/// Checks every structural invariant; errors name the first offending vertex.
pub fn validate_game(g: &Game) -> Result<()> {
    let n = g.num_vertices();
    if g.kind == Kind::Reach && g.target.is_none() {
        return Err(Error::MissingTarget);
    }
    for v in 0..n {
        if g.out_degree(v) == 0 {
            return Err(Error::SinkVertex(v));
        }
        if g.kind == Kind::Parity && g.priority[v].is_none() {
            return Err(Error::MissingPriority(v));
        }
        let succ = g.successors(v);
        for (i, &w) in succ.iter().enumerate() {
            if w >= n {
                return Err(Error::UnknownVertex(w));
            }
            if succ[..i].contains(&w) {
                return Err(Error::DuplicateEdge { from: v, to: w });
            }
        }
        match g.owner[v] {
            Owner::P0 | Owner::P1 => {
                if g.edges(v).any(|(_, w)| w.is_some()) {
                    return Err(Error::WeightOnControlledEdge(v));
                }
            }
            Owner::Random => {
                let mut sum = Rational::zero();
                for (_, w) in g.edges(v) {
                    match w {
                        None => return Err(Error::MissingWeight(v)),
                        Some(w) if !w.is_positive() => return Err(Error::NonPositiveWeight(v)),
                        Some(w) => sum += w,
                    }
                }
                if !sum.is_one() {
                    return Err(Error::BadDistribution { vertex: v, sum });
                }
            }
        }
    }
    Ok(())
}

/// Fixes `f`: the strategy owner's vertices become random with a point
/// distribution on the chosen successor.
pub fn induced_mdp(g: &Game, f: &Strategy) -> Result<Game> {
    f.check(g)?;
    let owner = f.player.owner();
    Ok(g.remap(|v| {
        if g.owner[v] == owner {
            let w = f.choice(v).expect("checked total");
            (Owner::Random, vec![(w, Some(Rational::one()))])
        } else {
            (g.owner[v], g.edge_list(v))
        }
    }))
}

pub fn induced_mc(g: &Game, f0: &Strategy, f1: &Strategy) -> Result<Game> {
    if f0.player != Player::P0 {
        return Err(Error::StrategyMismatch { vertex: 0 });
    }
    if f1.player != Player::P1 {
        return Err(Error::StrategyMismatch { vertex: 0 });
    }
    f1.check(g)?;
    let mdp = induced_mdp(g, f0)?;
    induced_mdp(&mdp, f1)
}

/// A subgame together with the original id of each of its vertices.
#[derive(Clone, Debug)]
pub struct SubGame {
    pub game: Game,
    /// `origin[i]` is the id in the parent game of subgame vertex `i`.
    pub origin: Vec<usize>,
}

impl SubGame {
    /// Id in the subgame of parent vertex `v`, if kept.
    pub fn local(&self, v: usize) -> Option<usize> {
        self.origin.binary_search(&v).ok()
    }
}

/// `g ∩ keep`: vertices outside `keep` and all edges touching them are
/// dropped and the rest renumbered in increasing order. The result is not
/// validated; it may contain sinks or substochastic vertices.
pub fn restrict_vertices(g: &Game, keep: &RegionSet) -> SubGame {
    let origin: Vec<usize> = keep.iter().filter(|&v| v < g.num_vertices()).collect();
    let mut local = vec![usize::MAX; g.num_vertices()];
    for (i, &v) in origin.iter().enumerate() {
        local[v] = i;
    }
    let mut owner = Vec::with_capacity(origin.len());
    let mut priority = Vec::with_capacity(origin.len());
    let mut name = Vec::with_capacity(origin.len());
    let mut adjacency = Vec::with_capacity(origin.len());
    for &v in &origin {
        owner.push(g.owner[v]);
        priority.push(g.priority[v]);
        name.push(g.name[v].clone());
        adjacency.push(
            g.edges(v)
                .filter(|&(w, _)| local[w] != usize::MAX)
                .map(|(w, p)| (local[w], p.cloned()))
                .collect(),
        );
    }
    let target = g.target.as_ref().map(|t| {
        RegionSet::from_ids(
            origin.len(),
            origin
                .iter()
                .enumerate()
                .filter(|(_, &v)| t.contains(v))
                .map(|(i, _)| i),
        )
    });
    SubGame {
        game: Game::assemble(g.kind, owner, priority, name, adjacency, target),
        origin,
    }
}

/// `g ∩ keep` for an edge set containing every random edge.
pub fn restrict_edges(g: &Game, keep: &EdgeSet) -> Result<Game> {
    for v in g.vertices_of(Owner::Random) {
        for e in g.edge_range(v) {
            if !keep.contains(e) {
                return Err(Error::RandomEdgeDropped { from: v, to: g.succ[e] });
            }
        }
    }
    Ok(g.remap(|v| {
        let edges = g
            .edge_range(v)
            .filter(|&e| keep.contains(e))
            .map(|e| (g.succ[e], g.weight[e].clone()))
            .collect();
        (g.owner[v], edges)
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Switches {
    pub profitable: EdgeSet,
    pub neutral: EdgeSet,
    pub loss: EdgeSet,
}

/// Classifies controlled edges against a value vector. Profit and loss are
/// only assigned to Player 0 edges; Player 1 edges are either neutral or
/// unclassified.
pub fn classify_switches(g: &Game, val: &ValueVector) -> Result<Switches> {
    if val.len() != g.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.num_vertices(),
            found: val.len(),
        });
    }
    let mut out = Switches {
        profitable: EdgeSet::empty(g),
        neutral: EdgeSet::empty(g),
        loss: EdgeSet::empty(g),
    };
    for v in 0..g.num_vertices() {
        for e in g.edge_range(v) {
            let w = g.succ[e];
            match g.owner[v] {
                Owner::Random => out.neutral.insert(e),
                Owner::P0 => match val[w].cmp(&val[v]) {
                    std::cmp::Ordering::Greater => out.profitable.insert(e),
                    std::cmp::Ordering::Less => out.loss.insert(e),
                    std::cmp::Ordering::Equal => out.neutral.insert(e),
                },
                Owner::P1 => {
                    if val[w] == val[v] {
                        out.neutral.insert(e);
                    }
                }
            }
        }
    }
    Ok(out)
}

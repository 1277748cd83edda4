//! Built-in example games and deterministic generators.
//!
//! Random games use SplitMix64 (state += 0x9e3779b97f4a7c15, then the
//! 30/27/31 xor-shift-multiply finaliser with 0xbf58476d1ce4e5b9 and
//! 0x94d049bb133111eb), seeded directly with `GenSpec::seed`. A draw in
//! `0..k` is `next_u64() % k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder, Owner};
use crate::rational::{format_fraction, parse_rational, rat, Rational};

/// The six-vertex game where naive strategy improvement stalls at 11/20.
///
/// Ids: v0 = 0, v1 = 1, v0.55 = 2, v0.95 = 3, vw = 4, vl = 5.
pub fn example_pe() -> Game {
    let mut b = GameBuilder::parity();
    let v0 = b.vertex(Owner::P0, 0, "v0");
    let v1 = b.vertex(Owner::P1, 0, "v1");
    let p55 = b.vertex(Owner::Random, 0, "v0.55");
    let p95 = b.vertex(Owner::Random, 0, "v0.95");
    let vw = b.vertex(Owner::Random, 0, "vw");
    let vl = b.vertex(Owner::Random, 1, "vl");
    b.edge(v0, v1).edge(v0, p55);
    b.edge(v1, v0).edge(v1, p95);
    b.wedge(p55, vw, rat(11, 20)).wedge(p55, vl, rat(9, 20));
    b.wedge(p95, vw, rat(19, 20)).wedge(p95, vl, rat(1, 20));
    b.wedge(vw, vw, rat(1, 1));
    b.wedge(vl, vl, rat(1, 1));
    b.build().expect("static game")
}

/// The nine-vertex extension with a second, Player 1 controlled region.
///
/// Ids: v0 = 0, v1 = 1, v0.55 = 2, v0.95 = 3, vw = 4, v2 = 5, v3 = 6,
/// v0.5 = 7, vl = 8.
pub fn example_px() -> Game {
    let mut b = GameBuilder::parity();
    let v0 = b.vertex(Owner::P0, 0, "v0");
    let v1 = b.vertex(Owner::P1, 0, "v1");
    let p55 = b.vertex(Owner::Random, 0, "v0.55");
    let p95 = b.vertex(Owner::Random, 0, "v0.95");
    let vw = b.vertex(Owner::Random, 0, "vw");
    let v2 = b.vertex(Owner::P1, 0, "v2");
    let v3 = b.vertex(Owner::P0, 1, "v3");
    let p5 = b.vertex(Owner::Random, 0, "v0.5");
    let vl = b.vertex(Owner::Random, 1, "vl");
    b.edge(v0, v1).edge(v0, p55);
    b.edge(v1, v0).edge(v1, p95);
    b.wedge(p55, vw, rat(1, 10)).wedge(p55, v2, rat(9, 10));
    b.wedge(p95, vw, rat(9, 10)).wedge(p95, v2, rat(1, 10));
    b.wedge(vw, vw, rat(1, 1));
    b.edge(v2, v3).edge(v2, p5);
    b.edge(v3, v2).edge(v3, v3);
    b.wedge(p5, vl, rat(1, 2)).wedge(p5, vw, rat(1, 2));
    b.wedge(vl, vl, rat(1, 1));
    b.build().expect("static game")
}

/// Parameters of a random parity game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub n_vertices: usize,
    /// Probabilities of owners P0, P1 and random; written as `"a/b"` strings.
    #[serde(serialize_with = "ser_mix", deserialize_with = "de_mix")]
    pub owner_mix: [Rational; 3],
    pub max_out_degree: usize,
    pub n_priorities: u32,
    pub weight_denominator_bound: u64,
}

fn ser_mix<S: Serializer>(mix: &[Rational; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<String> = mix.iter().map(format_fraction).collect();
    strings.serialize(s)
}

fn de_mix<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<[Rational; 3], D::Error> {
    let strings: Vec<String> = Vec::deserialize(d)?;
    if strings.len() != 3 {
        return Err(serde::de::Error::custom("owner_mix needs three entries"));
    }
    let mut out = [Rational::zero(), Rational::zero(), Rational::zero()];
    for (slot, s) in out.iter_mut().zip(&strings) {
        *slot = parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))?;
    }
    Ok(out)
}

impl GenSpec {
    /// Small games with all three owners equally likely, at most three
    /// successors, four priorities and denominators up to 4.
    pub fn small(seed: u64, n_vertices: usize) -> Self {
        GenSpec {
            seed,
            n_vertices,
            owner_mix: [rat(1, 3), rat(1, 3), rat(1, 3)],
            max_out_degree: 3,
            n_priorities: 4,
            weight_denominator_bound: 4,
        }
    }
}

struct Draw(SplitMix64);

impl Draw {
    fn below(&mut self, k: u64) -> u64 {
        self.0.next_u64() % k
    }
}

/// Distinct draws from `0..k`, in draw order.
fn distinct(rng: &mut Draw, count: usize, k: u64, offset: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let x = offset + rng.below(k);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn random_game(spec: &GenSpec) -> Result<Game> {
    let n = spec.n_vertices;
    let bad = |m: &str| Err(Error::InfeasibleSpec(m.to_owned()));
    if n == 0 {
        return bad("n_vertices must be positive");
    }
    if spec.max_out_degree == 0 {
        return bad("max_out_degree must be positive");
    }
    if spec.n_priorities == 0 {
        return bad("n_priorities must be positive");
    }
    if spec.weight_denominator_bound == 0 {
        return bad("weight_denominator_bound must be positive");
    }
    if spec.owner_mix.iter().any(|p| *p < Rational::zero())
        || spec.owner_mix.iter().sum::<Rational>() != Rational::one()
    {
        return bad("owner_mix must be a probability distribution");
    }
    let lcm = spec.owner_mix.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let Some(scale) = lcm.to_u64() else {
        return bad("owner_mix denominators too large");
    };
    let cut0 = (&spec.owner_mix[0] * Rational::from_integer(lcm.clone())).to_integer();
    let cut1 = ((&spec.owner_mix[0] + &spec.owner_mix[1]) * Rational::from_integer(lcm)).to_integer();

    let mut rng = Draw(SplitMix64::seed_from_u64(spec.seed));
    let mut b = GameBuilder::parity();
    let mut owners = Vec::with_capacity(n);
    for _ in 0..n {
        let r = BigInt::from(rng.below(scale));
        let owner = if r < cut0 {
            Owner::P0
        } else if r < cut1 {
            Owner::P1
        } else {
            Owner::Random
        };
        let priority = rng.below(spec.n_priorities as u64) as u32;
        b.add_vertex(owner, Some(priority), None);
        owners.push(owner);
    }
    for (v, owner) in owners.into_iter().enumerate() {
        let mut k = (1 + rng.below(spec.max_out_degree as u64)).min(n as u64);
        if owner == Owner::Random {
            k = k.min(spec.weight_denominator_bound);
        }
        let targets = distinct(&mut rng, k as usize, n as u64, 0);
        if owner == Owner::Random {
            let hi = spec.weight_denominator_bound.max(k);
            let d = k + rng.below(hi - k + 1);
            let mut cuts = distinct(&mut rng, (k - 1) as usize, d - 1, 1);
            cuts.sort_unstable();
            let mut prev = 0;
            for (i, &w) in targets.iter().enumerate() {
                let next = if i + 1 == targets.len() { d } else { cuts[i] };
                b.wedge(v, w as usize, Rational::new(BigInt::from(next - prev), BigInt::from(d)));
                prev = next;
            }
        } else {
            for &w in &targets {
                b.edge(v, w as usize);
            }
        }
    }
    b.build()
}

/// Like [`random_game`], but the last two vertices become absorbing sinks:
/// `n - 2` is won (priority 0) and `n - 1` is lost (priority 1). Edges into
/// them act as terminal outcomes, so far more vertices get values strictly
/// between 0 and 1 than in a plain random game. Needs `n_vertices >= 3`.
pub fn random_game_with_sinks(spec: &GenSpec) -> Result<Game> {
    if spec.n_vertices < 3 {
        return Err(Error::InfeasibleSpec("need at least three vertices".into()));
    }
    let g = random_game(spec)?;
    let n = g.num_vertices();
    let (won, lost) = (n - 2, n - 1);
    let mut b = GameBuilder::parity();
    for v in 0..n {
        match v {
            _ if v == won => b.add_vertex(Owner::Random, Some(0), None),
            _ if v == lost => b.add_vertex(Owner::Random, Some(1), None),
            _ => b.add_vertex(g.owner(v), Some(g.priority(v)), None),
        };
    }
    for v in 0..n {
        if v == won || v == lost {
            b.wedge(v, v, Rational::one());
        } else {
            for (w, p) in g.edges(v) {
                b.add_edge(v, w, p.cloned());
            }
        }
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BattleObjective {
    ReachZone1,
    Zone1ThenZone2,
}

impl std::str::FromStr for BattleObjective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reach_zone1" => Ok(BattleObjective::ReachZone1),
            "zone1_then_zone2" => Ok(BattleObjective::Zone1ThenZone2),
            _ => Err(Error::BadParameters(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Turn {
    r0: (i8, i8),
    r1: (i8, i8),
    bullets: u8,
    r0_moves: bool,
    phase: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Won,
    Lost,
    Turn(Turn),
    /// Random outcome over already-known node ids.
    Split(Vec<(usize, Rational)>),
}

struct Arena {
    ids: HashMap<Node, usize>,
    nodes: Vec<Node>,
    queue: VecDeque<usize>,
}

impl Arena {
    fn id(&mut self, node: Node) -> usize {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.ids.insert(node, id);
        self.queue.push_back(id);
        id
    }
}

/// Two robots on an `n × n` grid. Robot R0 (Player 0) wants to reach the
/// corner zone `x, y < 3` (and afterwards the opposite corner for
/// `Zone1ThenZone2`); robot R1 (Player 1) may instead of moving fire one of
/// its `bullets`, destroying R0 with probability `p_destr^d` where `d` is the
/// Euclidean distance rounded to the nearest integer. Each move goes one tile
/// in a compass direction, or attempts two tiles and advances only one with
/// probability 1/2. R0 starts at `(n-1, n-1)` and moves first; R1 starts at
/// `(0, n-1)`. Only states reachable from the start are built; the start is
/// vertex 0.
pub fn battlefield(n: usize, bullets: u32, p_destr: &Rational, objective: BattleObjective) -> Result<Game> {
    if !(7..=60).contains(&n) {
        return Err(Error::BadParameters("grid size must be between 7 and 60".into()));
    }
    if *p_destr <= Rational::zero() || *p_destr >= Rational::one() {
        return Err(Error::BadParameters("p_destr must lie strictly between 0 and 1".into()));
    }
    if bullets > 200 {
        return Err(Error::BadParameters("too many bullets".into()));
    }
    let size = n as i8;
    let inside = |p: (i8, i8)| p.0 >= 0 && p.1 >= 0 && p.0 < size && p.1 < size;
    let zone1 = |p: (i8, i8)| p.0 < 3 && p.1 < 3;
    let zone2 = |p: (i8, i8)| p.0 >= size - 3 && p.1 >= size - 3;
    let hit_prob = |a: (i8, i8), b: (i8, i8)| {
        let dx = (a.0 - b.0) as i64;
        let dy = (a.1 - b.1) as i64;
        // round(sqrt(s)) = k  iff  (k - 1/2)^2 <= s < (k + 1/2)^2, i.e. 4k^2 - 4k + 1 <= 4s < 4k^2 + 4k + 1
        let s = dx * dx + dy * dy;
        let mut k = (s as f64).sqrt().round() as i64;
        while 4 * k * k + 4 * k < 4 * s {
            k += 1;
        }
        while k > 0 && 4 * k * k - 4 * k + 1 > 4 * s {
            k -= 1;
        }
        p_destr.pow(k as i32)
    };
    let half = rat(1, 2);

    let start = Turn {
        r0: (size - 1, size - 1),
        r1: (0, size - 1),
        bullets: bullets as u8,
        r0_moves: true,
        phase: 0,
    };
    let mut arena = Arena {
        ids: HashMap::new(),
        nodes: Vec::new(),
        queue: VecDeque::new(),
    };
    arena.id(Node::Turn(start));
    let won = arena.id(Node::Won);
    let lost = arena.id(Node::Lost);

    // Node reached after R0 arrives at `p`.
    let after_r0 = |arena: &mut Arena, t: &Turn, p: (i8, i8)| {
        let mut phase = t.phase;
        if zone1(p) {
            phase = 1;
        }
        let done = match objective {
            BattleObjective::ReachZone1 => phase == 1,
            BattleObjective::Zone1ThenZone2 => phase == 1 && zone2(p),
        };
        if done {
            return won;
        }
        arena.id(Node::Turn(Turn {
            r0: p,
            phase,
            r0_moves: false,
            ..*t
        }))
    };
    let after_r1 = |arena: &mut Arena, t: &Turn, p: (i8, i8)| {
        arena.id(Node::Turn(Turn {
            r1: p,
            r0_moves: true,
            ..*t
        }))
    };

    let mut edges: Vec<Vec<(usize, Option<Rational>)>> = Vec::new();
    let mut owners: Vec<Owner> = Vec::new();
    while let Some(id) = arena.queue.pop_front() {
        let node = arena.nodes[id].clone();
        let (owner, out) = match node {
            Node::Won | Node::Lost => (Owner::Random, vec![(id, Some(Rational::one()))]),
            Node::Split(dist) => (Owner::Random, dist.into_iter().map(|(w, p)| (w, Some(p))).collect()),
            Node::Turn(t) => {
                let pos = if t.r0_moves { t.r0 } else { t.r1 };
                let mut succ: Vec<usize> = Vec::new();
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let one = (pos.0 + dx, pos.1 + dy);
                    if !inside(one) {
                        continue;
                    }
                    let two = (pos.0 + 2 * dx, pos.1 + 2 * dy);
                    let step = |arena: &mut Arena, p| {
                        if t.r0_moves {
                            after_r0(arena, &t, p)
                        } else {
                            after_r1(arena, &t, p)
                        }
                    };
                    let a = step(&mut arena, one);
                    succ.push(a);
                    if inside(two) {
                        let b = step(&mut arena, two);
                        if b != a {
                            succ.push(arena.id(Node::Split(vec![(a, half.clone()), (b, half.clone())])));
                        }
                    }
                }
                if !t.r0_moves && t.bullets > 0 {
                    let hit = hit_prob(t.r0, t.r1);
                    let miss = arena.id(Node::Turn(Turn {
                        bullets: t.bullets - 1,
                        r0_moves: true,
                        ..t
                    }));
                    let dist = if hit.is_one() {
                        vec![(lost, Rational::one())]
                    } else {
                        vec![(lost, hit.clone()), (miss, Rational::one() - hit)]
                    };
                    succ.push(arena.id(Node::Split(dist)));
                }
                succ.sort_unstable();
                succ.dedup();
                let owner = if t.r0_moves { Owner::P0 } else { Owner::P1 };
                (owner, succ.into_iter().map(|w| (w, None)).collect())
            }
        };
        if edges.len() <= id {
            edges.resize(id + 1, Vec::new());
            owners.resize(id + 1, Owner::Random);
        }
        edges[id] = out;
        owners[id] = owner;
    }

    let mut b = GameBuilder::parity();
    for (id, node) in arena.nodes.iter().enumerate() {
        let (priority, name) = match node {
            Node::Won => (0, Some("won")),
            Node::Lost => (1, Some("lost")),
            _ if id == 0 => (1, Some("start")),
            _ => (1, None),
        };
        b.add_vertex(owners[id], Some(priority), name);
    }
    for (v, out) in edges.into_iter().enumerate() {
        for (w, p) in out {
            b.add_edge(v, w, p);
        }
    }
    b.build()
}

/// A large game made of `blocks` blocks. Each block is a random game of
/// `block_size` vertices followed by a copy of [`example_pe`], whose optimum
/// is only found through a neutral round. The blocks form a binary tree: the
/// first controlled vertex of block `i > 0` gets an extra edge to the first
/// vertex of block `(i - 1) / 2`, and the last controlled vertex of every
/// block an edge into its own copy of the stall gadget. Vertex 0 lies in the
/// root block.
pub fn block_game(seed: u64, blocks: usize, block_size: usize) -> Result<Game> {
    if blocks == 0 || block_size == 0 {
        return Err(Error::InfeasibleSpec("blocks and block_size must be positive".into()));
    }
    let pe = example_pe();
    let stride = block_size + pe.num_vertices();
    let mut b = GameBuilder::parity();
    let mut extra: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..blocks {
        let spec = GenSpec {
            seed: seed.wrapping_mul(0x100000001b3).wrapping_add(i as u64),
            n_vertices: block_size,
            owner_mix: [rat(1, 3), rat(1, 3), rat(1, 3)],
            max_out_degree: 2,
            n_priorities: 3,
            weight_denominator_bound: 3,
        };
        let g = random_game(&spec)?;
        let base = b.num_vertices();
        for part in [&g, &pe] {
            let offset = b.num_vertices();
            for v in 0..part.num_vertices() {
                b.add_vertex(part.owner(v), Some(part.priority(v)), None);
            }
            for v in 0..part.num_vertices() {
                for (w, p) in part.edges(v) {
                    b.add_edge(offset + v, offset + w, p.cloned());
                }
            }
        }
        let controlled: Vec<usize> = (0..block_size).filter(|&v| g.owner(v) != Owner::Random).collect();
        if let (Some(&first), Some(&last)) = (controlled.first(), controlled.last()) {
            if i > 0 {
                extra.entry(base + first).or_default().push((i - 1) / 2 * stride);
            }
            extra.entry(base + last).or_default().push(base + block_size);
        }
    }
    for (u, ws) in extra {
        for w in ws {
            b.edge(u, w);
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;

    #[test]
    fn examples_validate() {
        validate_game(&example_pe()).unwrap();
        validate_game(&example_px()).unwrap();
        assert_eq!(example_px().num_vertices(), 9);
    }

    #[test]
    fn random_games_are_deterministic_and_valid() {
        for seed in 0..50 {
            let spec = GenSpec::small(seed, 7);
            let a = random_game(&spec).unwrap();
            validate_game(&a).unwrap();
            assert_eq!(a, random_game(&spec).unwrap());
            for v in 0..a.num_vertices() {
                assert!(a.out_degree(v) <= 3);
                assert!(a.priority(v) < 4);
            }
        }
    }

    #[test]
    fn owner_mix_selects_owners() {
        let mut spec = GenSpec::small(3, 10);
        spec.owner_mix = [rat(0, 1), rat(0, 1), rat(1, 1)];
        assert!(random_game(&spec).unwrap().is_mc());
        spec.owner_mix = [rat(1, 2), rat(0, 1), rat(1, 3)];
        assert!(matches!(random_game(&spec), Err(Error::InfeasibleSpec(_))));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = GenSpec::small(9, 5);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"1/3\""));
        assert_eq!(serde_json::from_str::<GenSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn battlefield_shape() {
        let g = battlefield(7, 1, &rat(1, 2), BattleObjective::ReachZone1).unwrap();
        validate_game(&g).unwrap();
        assert_eq!(g.name(0), Some("start"));
        assert_eq!(g.owner(0), Owner::P0);
        assert!(battlefield(5, 1, &rat(1, 2), BattleObjective::ReachZone1).is_err());
        assert!(battlefield(7, 1, &rat(1, 1), BattleObjective::ReachZone1).is_err());
    }

    #[test]
    fn block_game_links_blocks() {
        let g = block_game(1, 7, 6).unwrap();
        validate_game(&g).unwrap();
        assert_eq!(g.num_vertices(), 7 * 12);
    }
}

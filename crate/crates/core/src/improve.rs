//! The combined solver: realising initialisation by reachability solves,
//! then strategy improvement that falls back to qualitative improvement on
//! the neutral subgame whenever no profitable switch exists.

use num_traits::{One, Zero};
use std::fmt::Write as _;

use crate::error::Result;
use crate::eval::{parity_values, Mode};
use crate::game::{classify_switches, induced_mdp, restrict_edges, restrict_vertices, Game, Owner, Player};
use crate::options::SolveOptions;
use crate::quali::winning_region;
use crate::rational::{format_exact, Rational};
use crate::reach::reach_solve_with;
use crate::region::RegionSet;
use crate::strategy::{Strategy, ValueVector};

/// One step of the algorithm, in original vertex ids.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    /// Initialise found this almost-sure region at the given recursion depth.
    InitWinning {
        depth: usize,
        region: Vec<usize>,
    },
    /// Reachability solve towards the region: values and the value-0 set.
    InitReach {
        depth: usize,
        values: Vec<(usize, Rational)>,
        choices: Vec<(usize, usize)>,
        zero: Vec<usize>,
    },
    /// Initialise recurses on the value-0 subgame.
    InitRecurse {
        depth: usize,
        region: Vec<usize>,
    },
    /// Evaluation of the current strategy.
    Evaluate {
        iteration: usize,
        values: ValueVector,
    },
    /// Profitable switches applied, as `(vertex, new successor)`.
    Profitable {
        iteration: usize,
        switches: Vec<(usize, usize)>,
    },
    /// Neutral round: winning region of the neutral subgame and the updates.
    Neutral {
        iteration: usize,
        winning: Vec<usize>,
        updates: Vec<(usize, usize)>,
    },
    Terminate {
        iteration: usize,
    },
}

fn names(g: &Game, ids: &[usize]) -> String {
    let v: Vec<String> = ids.iter().map(|&v| g.label(v)).collect();
    format!("{{{}}}", v.join(", "))
}

fn moves(g: &Game, pairs: &[(usize, usize)]) -> String {
    let v: Vec<String> = pairs
        .iter()
        .map(|&(a, b)| format!("{}->{}", g.label(a), g.label(b)))
        .collect();
    v.join(", ")
}

impl TraceEvent {
    /// One-line rendering using vertex labels of `g`.
    pub fn render(&self, g: &Game) -> String {
        match self {
            TraceEvent::InitWinning { depth, region } => {
                format!("init[{depth}] winning {}", names(g, region))
            }
            TraceEvent::InitReach {
                depth,
                values,
                choices,
                zero,
            } => {
                let mut s = format!("init[{depth}] reach");
                for (v, x) in values {
                    let _ = write!(s, " {}={}", g.label(*v), format_exact(x));
                }
                let _ = write!(s, " choose [{}] zero {}", moves(g, choices), names(g, zero));
                s
            }
            TraceEvent::InitRecurse { depth, region } => {
                format!("init[{depth}] recurse {}", names(g, region))
            }
            TraceEvent::Evaluate { iteration, values } => {
                let mut s = format!("iter {iteration} evaluate");
                for (v, x) in values.iter().enumerate() {
                    let _ = write!(s, " {}={}", g.label(v), format_exact(x));
                }
                s
            }
            TraceEvent::Profitable { iteration, switches } => {
                format!("iter {iteration} profitable {}", moves(g, switches))
            }
            TraceEvent::Neutral {
                iteration,
                winning,
                updates,
            } => format!(
                "iter {iteration} neutral winning {} update [{}]",
                names(g, winning),
                moves(g, updates)
            ),
            TraceEvent::Terminate { iteration } => format!("iter {iteration} terminate"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub values: ValueVector,
    pub strategy0: Strategy,
    /// Player 1's best response to `strategy0`.
    pub strategy1: Strategy,
    /// Number of strategy evaluations.
    pub outer_iterations: usize,
    pub profitable_rounds: usize,
    pub neutral_rounds: usize,
    pub trace: Option<Vec<TraceEvent>>,
}

struct Tracer {
    events: Option<Vec<TraceEvent>>,
    limit: usize,
}

impl Tracer {
    fn new(opts: &SolveOptions) -> Self {
        Tracer {
            events: opts.trace.then(Vec::new),
            limit: opts.trace_limit,
        }
    }

    fn on(&self) -> bool {
        self.events.as_ref().is_some_and(|e| e.len() < self.limit)
    }

    fn push(&mut self, event: impl FnOnce() -> TraceEvent) {
        if self.on() {
            self.events.as_mut().unwrap().push(event());
        }
    }
}

pub fn initialise(g: &Game) -> Result<Strategy> {
    initialise_with(g, &SolveOptions::default())
}

pub fn initialise_with(g: &Game, opts: &SolveOptions) -> Result<Strategy> {
    let mut tracer = Tracer::new(opts);
    initialise_traced(g, opts, &mut tracer)
}

fn initialise_traced(g: &Game, opts: &SolveOptions, tracer: &mut Tracer) -> Result<Strategy> {
    let origin: Vec<usize> = (0..g.num_vertices()).collect();
    init_rec(g, &origin, 0, opts, tracer)
}

/// Strategy for `g` (local ids); `origin` maps to the top-level ids.
fn init_rec(g: &Game, origin: &[usize], depth: usize, opts: &SolveOptions, tracer: &mut Tracer) -> Result<Strategy> {
    opts.check()?;
    let n = g.num_vertices();
    let (w, witness) = winning_region(g, opts)?;
    tracer.push(|| TraceEvent::InitWinning {
        depth,
        region: w.iter().map(|v| origin[v]).collect(),
    });
    let mut f = witness;
    if w.is_empty() {
        return Ok(f);
    }
    let r = reach_solve_with(g, &w, opts)?;
    let mut choices = Vec::new();
    for v in g.vertices_of(Owner::P0) {
        if !w.contains(v) {
            let c = r.strategy0.choice(v).expect("total");
            f.set(v, c);
            choices.push((origin[v], origin[c]));
        }
    }
    let zero = RegionSet::from_predicate(n, |v| r.values[v].is_zero());
    tracer.push(|| TraceEvent::InitReach {
        depth,
        values: (0..n).map(|v| (origin[v], r.values[v].clone())).collect(),
        choices,
        zero: zero.iter().map(|v| origin[v]).collect(),
    });
    if zero.is_empty() {
        return Ok(f);
    }
    // The value-0 set is closed under random moves and Player 0 moves, and
    // Player 1 keeps a successor inside, so the restriction is a valid game.
    let sub = restrict_vertices(g, &zero);
    let sub_origin: Vec<usize> = sub.origin.iter().map(|&v| origin[v]).collect();
    tracer.push(|| TraceEvent::InitRecurse {
        depth,
        region: sub_origin.clone(),
    });
    let h = init_rec(&sub.game, &sub_origin, depth + 1, opts, tracer)?;
    for (v, c) in h.pairs() {
        f.set(sub.origin[v], sub.origin[c]);
    }
    Ok(f)
}

pub fn improve(g: &Game, f: &Strategy) -> Result<SolveReport> {
    improve_with(g, f, &SolveOptions::default())
}

pub fn improve_with(g: &Game, f: &Strategy, opts: &SolveOptions) -> Result<SolveReport> {
    let mut tracer = Tracer::new(opts);
    improve_traced(g, f, opts, &mut tracer)
}

fn improve_traced(g: &Game, f: &Strategy, opts: &SolveOptions, tracer: &mut Tracer) -> Result<SolveReport> {
    f.check(g)?;
    let n = g.num_vertices();
    let mut f = f.clone();
    let mut warm: Option<Vec<Option<usize>>> = None;
    let (mut iteration, mut profitable_rounds, mut neutral_rounds) = (0, 0, 0);
    loop {
        opts.check()?;
        iteration += 1;
        let mdp = induced_mdp(g, &f)?;
        let (x, adversary) = parity_values(&mdp, Owner::P1, Mode::Minimize, warm.as_deref());
        let values = ValueVector(x);
        tracer.push(|| TraceEvent::Evaluate {
            iteration,
            values: values.clone(),
        });

        let mut switches = Vec::new();
        for v in g.vertices_of(Owner::P0) {
            let cur = f.choice(v).expect("total");
            let mut best = cur;
            for &w in g.successors(v) {
                if values[w] > values[best] || (values[w] == values[best] && w < best && values[w] > values[cur]) {
                    best = w;
                }
            }
            if best != cur {
                switches.push((v, best));
            }
        }
        warm = Some(adversary);
        if !switches.is_empty() {
            for &(v, w) in &switches {
                f.set(v, w);
            }
            profitable_rounds += 1;
            tracer.push(|| TraceEvent::Profitable { iteration, switches });
            continue;
        }

        let neutral = classify_switches(g, &values)?.neutral;
        let sub = restrict_edges(g, &neutral)?;
        let (w, h) = winning_region(&sub, opts)?;
        let fresh = RegionSet::from_predicate(n, |v| w.contains(v) && !values[v].is_one());
        if !fresh.is_empty() {
            let mut updates = Vec::new();
            for v in fresh.iter().filter(|&v| g.owner(v) == Owner::P0) {
                let c = h.choice(v).expect("total");
                if f.choice(v) != Some(c) {
                    f.set(v, c);
                    updates.push((v, c));
                }
            }
            debug_assert!(!updates.is_empty(), "neutral round without a strategy change");
            if !updates.is_empty() {
                neutral_rounds += 1;
                tracer.push(|| TraceEvent::Neutral {
                    iteration,
                    winning: w.to_vec(),
                    updates,
                });
                continue;
            }
        }
        tracer.push(|| TraceEvent::Terminate { iteration });
        let adversary = warm.take().expect("set above");
        let strategy1 = Strategy::from_pairs(
            Player::P1,
            n,
            adversary.iter().enumerate().filter_map(|(v, c)| c.map(|c| (v, c))),
        );
        return Ok(SolveReport {
            values,
            strategy0: f,
            strategy1,
            outer_iterations: iteration,
            profitable_rounds,
            neutral_rounds,
            trace: tracer.events.take(),
        });
    }
}

pub fn main_solve(g: &Game) -> Result<SolveReport> {
    main_solve_with(g, &SolveOptions::default())
}

pub fn main_solve_with(g: &Game, opts: &SolveOptions) -> Result<SolveReport> {
    g.validate()
        .map_err(|e| crate::error::Error::InvalidGame(Box::new(e)))?;
    let mut tracer = Tracer::new(opts);
    let f = initialise_traced(g, opts, &mut tracer)?;
    improve_traced(g, &f, opts, &mut tracer)
}

/// Value vectors of the accepted evaluations recorded in a trace, in order.
pub fn evaluated_values(trace: &[TraceEvent]) -> Vec<&ValueVector> {
    trace
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Evaluate { values, .. } => Some(values),
            _ => None,
        })
        .collect()
}

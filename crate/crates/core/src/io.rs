//! Text formats for games and strategies.
//!
//! ```text
//! mpg parity
//! # comment
//! vertex 0 0 0 v0
//! vertex 1 r 1
//! edge 0 1
//! edge 1 1 1/1
//! ```
//!
//! Owners are `0`, `1` or `r`; the priority is `-` in reachability games,
//! which end with a `target <id> ...` line. Weights appear exactly on edges
//! leaving random vertices.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{validate_game, Game, GameBuilder, Kind, Owner, Player};
use crate::rational::{format_fraction, parse_rational};
use crate::strategy::Strategy;

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

/// Splits a line into tokens, dropping a trailing `#` comment.
fn tokens(raw: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for tok in raw.split_whitespace() {
        if tok.starts_with('#') {
            break;
        }
        out.push(tok);
    }
    out
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a vertex id, found {tok:?}")))
}

struct VertexLine {
    line: usize,
    owner: Owner,
    priority: Option<u32>,
    name: Option<String>,
}

/// Line numbers of the declarations, for error provenance.
struct Provenance {
    vertex: Vec<usize>,
    edges: HashMap<(usize, usize), Vec<usize>>,
    edge_order: Vec<(usize, usize, usize)>,
}

impl Provenance {
    fn locate(&self, g: &Game, err: &Error) -> Option<usize> {
        let vertex = |v: usize| self.vertex.get(v).copied();
        let first_edge = |v: usize, pred: &dyn Fn(usize) -> bool| {
            self.edge_order
                .iter()
                .find(|&&(from, to, _)| from == v && pred(to))
                .map(|&(_, _, line)| line)
        };
        match *err {
            Error::SinkVertex(v) | Error::MissingPriority(v) | Error::BadDistribution { vertex: v, .. } => vertex(v),
            Error::WeightOnControlledEdge(v) => {
                first_edge(v, &|w| g.edge_index(v, w).and_then(|e| g.edge_weight(e)).is_some())
            }
            Error::MissingWeight(v) => first_edge(v, &|w| g.edge_index(v, w).and_then(|e| g.edge_weight(e)).is_none()),
            Error::NonPositiveWeight(v) => first_edge(v, &|w| {
                g.edge_index(v, w)
                    .and_then(|e| g.edge_weight(e))
                    .is_some_and(|p| *p <= num_traits::Zero::zero())
            }),
            Error::DuplicateEdge { from, to } => self.edges.get(&(from, to)).and_then(|l| l.get(1)).copied(),
            _ => None,
        }
    }
}

pub fn parse_game(text: &str) -> Result<Game> {
    let mut kind: Option<Kind> = None;
    let mut vertices: HashMap<usize, VertexLine> = HashMap::new();
    let mut edges: Vec<(usize, usize, Option<crate::rational::Rational>, usize)> = Vec::new();
    let mut target: Option<(Vec<usize>, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(&head) = toks.first() else { continue };
        if kind.is_none() {
            kind = Some(match toks.as_slice() {
                ["mpg", "parity"] => Kind::Parity,
                ["mpg", "reach"] => Kind::Reach,
                _ => return Err(parse_err(line, "expected header `mpg parity` or `mpg reach`")),
            });
            continue;
        }
        match head {
            "vertex" => {
                if !(4..=5).contains(&toks.len()) {
                    return Err(parse_err(line, "expected `vertex <id> <owner> <priority|-> [name]`"));
                }
                let id = parse_id(toks[1], line)?;
                let owner = match toks[2] {
                    "0" => Owner::P0,
                    "1" => Owner::P1,
                    "r" => Owner::Random,
                    other => return Err(parse_err(line, format!("unknown owner {other:?}"))),
                };
                let priority = match toks[3] {
                    "-" => None,
                    p => Some(
                        p.parse::<u32>()
                            .map_err(|_| parse_err(line, format!("bad priority {p:?}")))?,
                    ),
                };
                let v = VertexLine {
                    line,
                    owner,
                    priority,
                    name: toks.get(4).map(|s| s.to_string()),
                };
                if vertices.insert(id, v).is_some() {
                    return Err(parse_err(line, format!("vertex {id} declared twice")));
                }
            }
            "edge" => {
                if !(3..=4).contains(&toks.len()) {
                    return Err(parse_err(line, "expected `edge <src> <dst> [num/den]`"));
                }
                let from = parse_id(toks[1], line)?;
                let to = parse_id(toks[2], line)?;
                let weight = match toks.get(3) {
                    None => None,
                    Some(w) => Some(parse_rational(w).ok_or_else(|| parse_err(line, format!("bad weight {w:?}")))?),
                };
                edges.push((from, to, weight, line));
            }
            "target" => {
                if target.is_some() {
                    return Err(parse_err(line, "second target line"));
                }
                let ids = toks[1..]
                    .iter()
                    .map(|t| parse_id(t, line))
                    .collect::<Result<Vec<_>>>()?;
                target = Some((ids, line));
            }
            other => return Err(parse_err(line, format!("unknown directive {other:?}"))),
        }
    }

    let kind = kind.ok_or_else(|| parse_err(1, "missing header"))?;
    let n = vertices.len();
    let mut b = GameBuilder::new(kind);
    let mut prov = Provenance {
        vertex: Vec::with_capacity(n),
        edges: HashMap::new(),
        edge_order: Vec::new(),
    };
    for id in 0..n {
        let v = vertices
            .remove(&id)
            .ok_or_else(|| parse_err(1, format!("vertex ids must be 0..{n}; {id} is missing")))?;
        if kind == Kind::Parity && v.priority.is_none() {
            return Err(Error::AtLine {
                line: v.line,
                source: Box::new(Error::MissingPriority(id)),
            });
        }
        b.add_vertex(v.owner, v.priority, v.name.as_deref());
        prov.vertex.push(v.line);
    }
    for (from, to, w, line) in edges {
        for v in [from, to] {
            if v >= n {
                return Err(Error::AtLine {
                    line,
                    source: Box::new(Error::UnknownVertex(v)),
                });
            }
        }
        prov.edges.entry((from, to)).or_default().push(line);
        prov.edge_order.push((from, to, line));
        b.add_edge(from, to, w);
    }
    match (kind, target) {
        (Kind::Reach, Some((ids, line))) => {
            if let Some(&bad) = ids.iter().find(|&&v| v >= n) {
                return Err(Error::AtLine {
                    line,
                    source: Box::new(Error::UnknownVertex(bad)),
                });
            }
            b.set_target(ids);
        }
        (Kind::Parity, Some((_, line))) => return Err(parse_err(line, "target line in a parity game")),
        (Kind::Reach, None) => return Err(Error::MissingTarget),
        (Kind::Parity, None) => {}
    }
    let g = b.build()?;
    if let Err(e) = validate_game(&g) {
        return Err(match prov.locate(&g, &e) {
            Some(line) => Error::AtLine {
                line,
                source: Box::new(e),
            },
            None => e,
        });
    }
    Ok(g)
}

fn name_is_writable(name: &str) -> bool {
    !name.is_empty() && !name.starts_with('#') && !name.chars().any(char::is_whitespace)
}

pub fn serialize_game(g: &Game) -> String {
    let mut out = String::new();
    let kind = match g.kind() {
        Kind::Parity => "parity",
        Kind::Reach => "reach",
    };
    writeln!(out, "mpg {kind}").unwrap();
    for v in 0..g.num_vertices() {
        let owner = match g.owner(v) {
            Owner::P0 => "0",
            Owner::P1 => "1",
            Owner::Random => "r",
        };
        let priority = g.priority_opt(v).map_or_else(|| "-".to_owned(), |p| p.to_string());
        write!(out, "vertex {v} {owner} {priority}").unwrap();
        if let Some(name) = g.name(v).filter(|s| name_is_writable(s)) {
            write!(out, " {name}").unwrap();
        }
        out.push('\n');
    }
    for v in 0..g.num_vertices() {
        for (w, p) in g.edges(v) {
            match p {
                Some(p) => writeln!(out, "edge {v} {w} {}", format_fraction(p)).unwrap(),
                None => writeln!(out, "edge {v} {w}").unwrap(),
            }
        }
    }
    if let Some(t) = g.target() {
        out.push_str("target");
        for v in t.iter() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// One `<vertex> <successor>` line per choice, in vertex order.
pub fn serialize_strategy(f: &Strategy) -> String {
    let mut out = String::new();
    for (v, w) in f.pairs() {
        writeln!(out, "{v} {w}").unwrap();
    }
    out
}

/// Parses a strategy for `player`; it must be total on that player's vertices.
pub fn parse_strategy(text: &str, g: &Game, player: Player) -> Result<Strategy> {
    let n = g.num_vertices();
    let mut f = Strategy::empty(player, n);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let [v, w] = toks.as_slice() else {
            return Err(parse_err(line, "expected `<vertex> <successor>`"));
        };
        let v = parse_id(v, line)?;
        let w = parse_id(w, line)?;
        if v >= n || w >= n || g.owner(v) != player.owner() || !g.has_edge(v, w) {
            return Err(Error::NonEdgeChoice { line });
        }
        if f.choice(v).is_some() {
            return Err(parse_err(line, format!("second choice for vertex {v}")));
        }
        f.set(v, w);
    }
    f.check(g)?;
    Ok(f)
}

/// The player whose vertices a strategy file lists; `None` for an empty file
/// or one that mentions unknown vertices.
pub fn strategy_player(text: &str, g: &Game) -> Option<Player> {
    let first = text.lines().map(tokens).find(|t| !t.is_empty())?;
    let v: usize = first.first()?.parse().ok()?;
    if v >= g.num_vertices() {
        return None;
    }
    g.owner(v).player()
}

//! Runs several solvers over a set of games and cross-checks their values.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Kind};
use crate::improve::main_solve_with;
use crate::options::SolveOptions;
use crate::quali::brute_force_with;
use crate::rational::{format_decimal, format_exact};
use crate::reach::reach_solve_with;
use crate::reduction::oracle_solve_with;
use crate::strategy::ValueVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverId {
    Main,
    Oracle,
    Brute,
}

impl SolverId {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Main => "main",
            SolverId::Oracle => "oracle",
            SolverId::Brute => "brute",
        }
    }
}

impl FromStr for SolverId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(SolverId::Main),
            "oracle" => Ok(SolverId::Oracle),
            "brute" => Ok(SolverId::Brute),
            _ => Err(Error::BadParameters(format!("unknown solver {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchStatus {
    Ok,
    Timeout,
    /// Completed, but the digest differs from the first completed solver.
    Mismatch,
    Error(String),
}

impl BenchStatus {
    fn label(&self) -> String {
        match self {
            BenchStatus::Ok => "ok".into(),
            BenchStatus::Timeout => "timeout".into(),
            BenchStatus::Mismatch => "mismatch".into(),
            BenchStatus::Error(e) => format!("error: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub game: String,
    pub solver: SolverId,
    pub vertices: usize,
    pub colours: usize,
    /// Exact value at vertex 0, when the run completed.
    pub p_max: Option<String>,
    pub p_max_decimal: Option<String>,
    pub t_sol_ms: u128,
    pub outer_iterations: usize,
    pub profitable_rounds: usize,
    pub neutral_rounds: usize,
    pub digest: Option<String>,
    pub status: BenchStatus,
}

struct Outcome {
    values: ValueVector,
    outer: usize,
    profitable: usize,
    neutral: usize,
}

fn run_one(g: &Game, solver: SolverId, opts: &SolveOptions) -> Result<Outcome> {
    opts.check()?;
    if g.kind() == Kind::Reach {
        if solver != SolverId::Main {
            return Err(Error::WrongKind { expected: "parity" });
        }
        let target = g.target().ok_or(Error::MissingTarget)?;
        let r = reach_solve_with(g, target, opts)?;
        return Ok(Outcome {
            values: r.values,
            outer: r.iterations + 1,
            profitable: r.iterations,
            neutral: 0,
        });
    }
    let r = match solver {
        SolverId::Main => main_solve_with(g, opts)?,
        SolverId::Oracle => oracle_solve_with(g, opts)?,
        SolverId::Brute => {
            let b = brute_force_with(g, opts)?;
            return Ok(Outcome {
                values: b.values,
                outer: 0,
                profitable: 0,
                neutral: 0,
            });
        }
    };
    Ok(Outcome {
        values: r.values,
        outer: r.outer_iterations,
        profitable: r.profitable_rounds,
        neutral: r.neutral_rounds,
    })
}

/// Runs every solver on every game, each under its own `timeout`. Cells run
/// concurrently; records come back ordered by game, then by the order of
/// `solvers`. Errors and timeouts are recorded, never propagated.
pub fn bench_run(games: &[(String, Game)], solvers: &[SolverId], timeout: Duration) -> Vec<BenchRecord> {
    let cells: Vec<(usize, usize)> = (0..games.len())
        .flat_map(|g| (0..solvers.len()).map(move |s| (g, s)))
        .collect();
    let mut records: Vec<(usize, usize, BenchRecord)> = cells
        .into_par_iter()
        .map(|(gi, si)| {
            let (name, g) = &games[gi];
            let solver = solvers[si];
            let opts = SolveOptions::default().with_timeout(timeout);
            let start = Instant::now();
            let outcome = run_one(g, solver, &opts);
            let elapsed = start.elapsed().as_millis();
            let mut rec = BenchRecord {
                game: name.clone(),
                solver,
                vertices: g.num_vertices(),
                colours: g.colours(),
                p_max: None,
                p_max_decimal: None,
                t_sol_ms: elapsed,
                outer_iterations: 0,
                profitable_rounds: 0,
                neutral_rounds: 0,
                digest: None,
                status: BenchStatus::Ok,
            };
            match outcome {
                Ok(o) => {
                    if let Some(v0) = o.values.0.first() {
                        rec.p_max = Some(format_exact(v0));
                        rec.p_max_decimal = Some(format_decimal(v0, 10));
                    }
                    rec.outer_iterations = o.outer;
                    rec.profitable_rounds = o.profitable;
                    rec.neutral_rounds = o.neutral;
                    rec.digest = Some(o.values.digest());
                }
                Err(Error::Timeout) => rec.status = BenchStatus::Timeout,
                Err(e) => rec.status = BenchStatus::Error(e.to_string()),
            }
            (gi, si, rec)
        })
        .collect();
    records.sort_by_key(|(g, s, _)| (*g, *s));

    let mut out: Vec<BenchRecord> = records.into_iter().map(|(_, _, r)| r).collect();
    for chunk in out.chunk_by_mut(|a, b| a.game == b.game) {
        let reference = chunk.iter().find_map(|r| r.digest.clone());
        if let Some(reference) = reference {
            for r in chunk.iter_mut() {
                if r.digest.as_ref().is_some_and(|d| *d != reference) {
                    r.status = BenchStatus::Mismatch;
                }
            }
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub const CSV_HEADER: &str = "game,solver,vertices,colours,p_max_exact,p_max_decimal,t_sol_ms,iterations,status";

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&r.game),
            r.solver.as_str(),
            r.vertices,
            r.colours,
            r.p_max.as_deref().unwrap_or(""),
            r.p_max_decimal.as_deref().unwrap_or(""),
            r.t_sol_ms,
            r.outer_iterations,
            csv_field(&r.status.label()),
        )
        .unwrap();
    }
    out
}

pub fn records_to_jsonl(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialise"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::example_pe;

    const ALL: [SolverId; 3] = [SolverId::Main, SolverId::Oracle, SolverId::Brute];

    #[test]
    fn pe_all_solvers_agree() {
        let games = vec![("pe".to_owned(), example_pe())];
        let recs = bench_run(&games, &ALL, Duration::from_secs(60));
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.status == BenchStatus::Ok));
        assert!(recs.iter().all(|r| r.digest == recs[0].digest));
        assert_eq!(recs[0].p_max.as_deref(), Some("19/20"));
        let csv = records_to_csv(&recs);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("pe,main,6,2,19/20,0.9500000000,"));
        assert_eq!(records_to_jsonl(&recs).lines().count(), 3);
    }

    #[test]
    fn empty_and_zero_timeout() {
        assert!(bench_run(&[], &ALL, Duration::from_secs(1)).is_empty());
        let games = vec![("pe".to_owned(), example_pe())];
        let recs = bench_run(&games, &ALL, Duration::ZERO);
        assert!(recs.iter().all(|r| r.status == BenchStatus::Timeout));
    }
}

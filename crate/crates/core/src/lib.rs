//! Exact solvers for turn-based stochastic parity games (2.5-player games)
//! under the min-parity convention: Player 0 wins a play when the least
//! priority seen infinitely often is even.
//!
//! The main entry point is [`main_solve`], a strategy improvement loop that
//! escapes non-optimal fixpoints by solving the qualitative problem on the
//! subgame of value-preserving edges. Two independent oracles,
//! [`brute_force_values`] and [`oracle_solve_via_reduction`], produce the same
//! exact values by other means.

pub mod bench;
pub mod error;
pub mod eval;
pub mod game;
pub mod gen;
pub mod graph;
pub mod improve;
pub mod io;
pub mod linear;
pub mod options;
pub mod quali;
pub mod rational;
pub mod reach;
pub mod reduction;
pub mod region;
pub mod strategy;

pub use bench::{bench_run, BenchRecord, BenchStatus, SolverId};
pub use error::{Error, Result};
pub use eval::{
    mc_bsccs, mc_parity_value, mc_reach_value, mdp_mecs, mdp_parity_value, mdp_reach, EcDecomposition, Mode,
};
pub use game::{
    classify_switches, even_min_wins, induced_mc, induced_mdp, restrict_edges, restrict_vertices, validate_game, Game,
    GameBuilder, Kind, Owner, Player, SubGame, Switches,
};
pub use gen::{
    battlefield, block_game, example_pe, example_px, random_game, random_game_with_sinks, BattleObjective, GenSpec,
};
pub use improve::{
    improve, improve_with, initialise, initialise_with, main_solve, main_solve_with, SolveReport, TraceEvent,
};
pub use io::{parse_game, parse_strategy, serialize_game, serialize_strategy};
pub use options::{QualiEngine, SolveOptions};
pub use quali::{
    brute_force_values, brute_force_with, positive_attractor, quali_solve, quali_solve_with, BruteResult, QualiResult,
};
pub use rational::Rational;
pub use reach::{reach_solve, reach_solve_with, zero_value_region, ReachSolveResult};
pub use reduction::{
    andersson_delta, build_gadget, lift_strategy, oracle_solve_via_reduction, oracle_solve_with, GadgetGame,
};
pub use region::{EdgeSet, RegionSet};
pub use strategy::{Strategy, ValueVector};

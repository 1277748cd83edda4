use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {0} has no successors")]
    SinkVertex(usize),
    #[error("distribution of vertex {vertex} sums to {sum}, expected 1")]
    BadDistribution { vertex: usize, sum: Rational },
    #[error("controlled vertex {0} carries an edge weight")]
    WeightOnControlledEdge(usize),
    #[error("random vertex {0} has an edge without weight")]
    MissingWeight(usize),
    #[error("random vertex {0} has a non-positive edge weight")]
    NonPositiveWeight(usize),
    #[error("vertex {0} has no priority")]
    MissingPriority(usize),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("reachability game without a target set")]
    MissingTarget,
    #[error("operation needs a {expected} game")]
    WrongKind { expected: &'static str },
    #[error("strategy choice at vertex {vertex} is not an edge or not total")]
    StrategyMismatch { vertex: usize },
    #[error("edge restriction drops random edge {from} -> {to}")]
    RandomEdgeDropped { from: usize, to: usize },
    #[error("value vector has {found} entries, game has {expected} vertices")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("game is not a Markov chain")]
    NotAnMC,
    #[error("game is not a Markov decision process")]
    NotAnMDP,
    #[error("both players control vertices")]
    TwoControlledPlayers,
    #[error("invalid game: {0}")]
    InvalidGame(Box<Error>),
    #[error("instance too large (bound {bound})")]
    TooLarge { bound: u64 },
    #[error("delta must lie in (0, 1]")]
    BadDelta,
    #[error("choice at vertex {0} is not a primed vertex")]
    NotAPrimedTarget(usize),
    #[error("lifted strategies are not mutually optimal")]
    NotMutuallyOptimal,
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("timed out")]
    Timeout,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: choice is not an edge of the game")]
    NonEdgeChoice { line: usize },
    #[error("line {line}: {source}")]
    AtLine { line: usize, source: Box<Error> },
}

impl Error {
    /// True for errors that report a structurally invalid game.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::SinkVertex(_)
            | Error::BadDistribution { .. }
            | Error::WeightOnControlledEdge(_)
            | Error::MissingWeight(_)
            | Error::NonPositiveWeight(_)
            | Error::MissingPriority(_)
            | Error::DuplicateEdge { .. }
            | Error::UnknownVertex(_)
            | Error::MissingTarget
            | Error::InvalidGame(_) => true,
            Error::AtLine { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    /// True for syntax-level failures of the text formats.
    pub fn is_parse(&self) -> bool {
        match self {
            Error::Parse { .. } | Error::NonEdgeChoice { .. } => true,
            Error::AtLine { source, .. } => source.is_parse(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

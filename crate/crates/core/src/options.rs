use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Which qualitative engine answers almost-sure winning queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QualiEngine {
    /// Direct recursive algorithm on the arena; scales to large games.
    #[default]
    Recursive,
    /// Exact values by strategy enumeration, read off at 0 and 1.
    BruteForce,
    /// Exact values through the reachability gadget, read off at 0 and 1.
    Reduction,
    /// Brute force when the profile count fits the cap, else the gadget when
    /// the game is small enough, else the recursive engine.
    Auto,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub engine: QualiEngine,
    /// Record a trace of the main loop.
    pub trace: bool,
    /// Maximum number of trace events kept.
    pub trace_limit: usize,
    pub deadline: Option<Instant>,
    /// Largest strategy-profile count the brute-force oracle accepts.
    pub brute_cap: u64,
    /// Largest vertex count the reduction oracle accepts.
    pub reduction_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            engine: QualiEngine::default(),
            trace: false,
            trace_limit: 10_000,
            deadline: None,
            brute_cap: 1_000_000,
            reduction_cap: 12,
        }
    }
}

impl SolveOptions {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    pub fn with_engine(mut self, engine: QualiEngine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    /// Fails with `Timeout` once the deadline has passed.
    pub fn check(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

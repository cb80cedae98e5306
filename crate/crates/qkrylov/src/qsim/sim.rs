//! Simulation context: sampling mode, seeded randomness and query counters.

use std::ops::{Add, AddAssign, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Named query counters. Every controlled-U application, oracle state
/// preparation and postselection attempt lands in one of these; asymptotic
/// claims are checked qualitatively against them, never asserted exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounters {
    pub controlled_u: u64,
    pub state_preps: u64,
    pub postselections: u64,
}

impl QueryCounters {
    pub fn total(&self) -> u64 {
        self.controlled_u + self.state_preps + self.postselections
    }
}

impl Add for QueryCounters {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            controlled_u: self.controlled_u + rhs.controlled_u,
            state_preps: self.state_preps + rhs.state_preps,
            postselections: self.postselections + rhs.postselections,
        }
    }
}

impl AddAssign for QueryCounters {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for QueryCounters {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            controlled_u: self.controlled_u - rhs.controlled_u,
            state_preps: self.state_preps - rhs.state_preps,
            postselections: self.postselections - rhs.postselections,
        }
    }
}

enum Sampling {
    /// Oracle-grade deterministic estimates (no measurement noise). Phase-grid
    /// rounding still applies wherever an `eps_phase` is in force.
    Exact,
    /// Measurement outcomes sampled from the exact QPE distributions.
    Qpe(Box<ChaCha8Rng>),
}

/// Simulation context threaded through every quantum operation. Randomness is
/// isolated here; with the same seed, every run draws the same stream.
pub struct Sim {
    sampling: Sampling,
    pub counters: QueryCounters,
}

impl Sim {
    /// Deterministic oracle-grade mode: inner products and amplitudes are
    /// exact, only explicit phase grids introduce error.
    pub fn exact() -> Self {
        Self {
            sampling: Sampling::Exact,
            counters: QueryCounters::default(),
        }
    }

    /// Sampled mode with a seeded stream.
    pub fn seeded(seed: u64) -> Self {
        Self {
            sampling: Sampling::Qpe(Box::new(ChaCha8Rng::seed_from_u64(seed))),
            counters: QueryCounters::default(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.sampling, Sampling::Exact)
    }

    pub(crate) fn rng(&mut self) -> Option<&mut ChaCha8Rng> {
        match &mut self.sampling {
            Sampling::Exact => None,
            Sampling::Qpe(rng) => Some(rng),
        }
    }

    /// Snapshot for per-operation query deltas.
    pub fn snapshot(&self) -> QueryCounters {
        self.counters
    }

    pub fn since(&self, snap: QueryCounters) -> QueryCounters {
        self.counters - snap
    }
}

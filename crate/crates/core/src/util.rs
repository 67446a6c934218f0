//! Small shared utilities: a seedable RNG wrapper and budget tracking.

use std::time::{Duration, Instant};

pub use rand_chacha::rand_core::RngCore;
pub use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

/// Creates the deterministic RNG used everywhere in the toolkit.
///
/// All randomized components (generators, the Wp sampler, havoc) take a
/// `ChaCha12Rng` so that a recorded seed reproduces a run bit for bit.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Convenience sampling methods on top of any [`RngCore`].
pub trait RngExt {
    /// Uniform integer in `0..n`. `n` must be nonzero.
    fn below(&mut self, n: usize) -> usize;
    /// Uniform integer in `lo..=hi`.
    fn range_inclusive(&mut self, lo: i64, hi: i64) -> i64;
    /// True with probability `num/den`.
    fn chance(&mut self, num: u32, den: u32) -> bool;
    /// Uniform choice from a nonempty slice.
    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T;
    /// One uniformly random byte.
    fn byte(&mut self) -> u8;
}

impl<R: RngCore> RngExt for R {
    fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        // Modulo bias is < 2^-40 for every n used here (n is always far
        // below 2^24); acceptable for test generation and mutation.
        (self.next_u64() % n as u64) as usize
    }

    fn range_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.next_u64() % span) as i64
    }

    fn chance(&mut self, num: u32, den: u32) -> bool {
        assert!(den > 0);
        (self.next_u64() % den as u64) < num as u64
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }

    fn byte(&mut self) -> u8 {
        (self.next_u64() & 0xff) as u8
    }
}

/// A soft execution budget: an optional deadline plus an optional cap on
/// target executions. `None` fields mean unlimited.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_execs: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_wall(duration: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + duration),
            max_execs: None,
        }
    }

    pub fn with_execs(max: u64) -> Self {
        Budget {
            deadline: None,
            max_execs: Some(max),
        }
    }

    pub fn and_wall(mut self, duration: Duration) -> Self {
        self.deadline = Some(Instant::now() + duration);
        self
    }

    pub fn and_execs(mut self, max: u64) -> Self {
        self.max_execs = Some(max);
        self
    }

    /// True once the wall deadline has passed or `execs` reached the cap.
    pub fn exhausted(&self, execs: u64) -> bool {
        if let Some(cap) = self.max_execs {
            if execs >= cap {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return true;
            }
        }
        false
    }
}

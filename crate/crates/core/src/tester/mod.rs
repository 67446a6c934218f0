//! Conformance testing against a hypothesis: pairwise discriminator sets,
//! deterministic Wp suites for small state bounds, and the randomized
//! sampling variant with a geometric infix.

mod random;
mod wp;

pub use random::{run_tester, sample_random_wp, RandomWpParams, TesterStats};
pub use wp::{deterministic_wp_suite, deterministic_wp_suite_with_cap, WpContext, WpSuite};

use thiserror::Error;

use crate::fsm::{StateId, Word};

/// Default refusal threshold for deterministic suite sizes.
pub const DEFAULT_SUITE_CAP: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TestError {
    #[error("hypothesis states {0} and {1} are indistinguishable; the hypothesis is not minimal")]
    IndistinguishableStates(StateId, StateId),
    #[error("deterministic suite would contain {size} words, above the cap of {cap}")]
    SuiteTooLarge { size: u128, cap: u128 },
    #[error("the bound m={m} must be at least the hypothesis size n={n}")]
    BoundBelowHypothesis { m: u32, n: u32 },
}

/// A confirmed disagreement between target and hypothesis, trimmed to the
/// shortest disagreeing prefix: the attached output words differ exactly at
/// their final symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub word: Word,
    pub target_outputs: Word,
    pub hypothesis_outputs: Word,
}

impl Counterexample {
    /// Builds a counterexample from full runs, trimming to the shortest
    /// disagreeing prefix. Returns `None` when the outputs agree.
    pub fn from_disagreement(word: &Word, target: &Word, hypothesis: &Word) -> Option<Counterexample> {
        debug_assert_eq!(word.len(), target.len());
        debug_assert_eq!(word.len(), hypothesis.len());
        let split = (0..word.len()).find(|&i| target.get(i) != hypothesis.get(i))?;
        Some(Counterexample {
            word: word.prefix(split + 1),
            target_outputs: target.prefix(split + 1),
            hypothesis_outputs: hypothesis.prefix(split + 1),
        })
    }
}

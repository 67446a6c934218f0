//! Systems under test: a guarded-command reactive language with edge-coverage
//! instrumentation, a wrapper that turns any [`crate::fsm::MealyMachine`] into
//! a target, and the membership-query cache the learner and tester share.
//!
//! Targets follow a fork-server-like lifecycle: the program is loaded once,
//! and each test runs on a cheaply constructed fresh instance.

mod cache;
mod interp;
mod program;
mod target;

pub use cache::{CachedTarget, MembershipOracle};
pub use interp::{Execution, StepResult, TargetInstance};
pub use program::{
    Action, Guard, GuardedRule, IntExpr, Overflow, ProgramParseError, ReactiveProgram, RelOp,
    VarDecl,
};
pub use target::{wrap_fsm, FsmTarget, ProgramTarget, Target};

use thiserror::Error;

/// Identifier printed by an error action; positive and unique per program.
pub type ErrorId = u32;

/// The reserved output label emitted when no rule matches an input.
pub const INVALID_LABEL: &str = "invalid";

/// The reserved output label for error `id`.
pub fn error_label(id: ErrorId) -> String {
    format!("error{id}")
}

/// Recovers the error id from a reserved output label, if it is one.
pub fn error_id_of_label(label: &str) -> Option<ErrorId> {
    let digits = label.strip_prefix("error")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&id| id > 0)
}

/// Anything that consumes instrumentation locations of fired rules.
/// [`crate::fuzzer::TraceBitmap`] is the canonical implementation.
pub trait CoverageSink {
    fn record_edge(&mut self, location: u16);
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TargetError {
    #[error("input symbol {0} is not in the target's alphabet")]
    AlphabetMismatch(crate::fsm::SymbolId),
    #[error("step on a halted instance")]
    SteppedAfterHalt,
    #[error("nondeterministic target: conflicting outputs at position {position} of a query")]
    Nondeterminism { position: usize },
}

//! Learning finite-state models of black-box reactive programs.
//!
//! The toolkit combines three ways of interrogating a reactive system:
//!
//! * an active learner (`learner`) that infers a Mealy machine through
//!   membership queries and a discrimination tree,
//! * a conformance tester (`tester`) implementing the Wp method, both the
//!   deterministic suite and a randomized sampling variant, and
//! * a coverage-guided mutation fuzzer (`fuzzer`) that doubles as an
//!   independent source of counterexamples and error-state witnesses.
//!
//! Systems under test live in `runtime`: either a guarded-command reactive
//! program interpreted with edge-coverage instrumentation, or any
//! [`fsm::MealyMachine`] wrapped as a target. `oracle` turns testers and fuzz
//! corpora into equivalence oracles for the learner, and `harness` runs whole
//! campaigns and writes reports.

pub mod fsm;
pub mod fuzzer;
pub mod harness;
pub mod learner;
pub mod oracle;
pub mod runtime;
pub mod tester;
pub mod util;

pub use fsm::{Alphabet, MealyMachine, StateId, SymbolId, Word};

//! Mealy machines and the pure automata algorithms the rest of the toolkit
//! builds on: execution, access sequences, discriminators, equivalence
//! checking, covers, minimization, and DOT serialization.

mod alphabet;
mod dot;
mod generate;
mod machine;

pub use alphabet::{Alphabet, AlphabetError, SymbolId, Word};
pub use dot::DotParseError;
pub use generate::{random_machine, random_minimal_machine};
pub use machine::{FsmError, MealyMachine, StateId};

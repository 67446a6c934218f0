//! The target abstraction: anything executable test-by-test with optional
//! coverage instrumentation.

use crate::fsm::{Alphabet, MealyMachine, Word};

use super::interp::Execution;
use super::program::ReactiveProgram;
use super::{error_id_of_label, CoverageSink, ErrorId, TargetError};

/// A resettable black box: executes whole input words on fresh instances.
pub trait Target {
    fn inputs(&self) -> &Alphabet;
    fn outputs(&self) -> &Alphabet;

    /// Runs `word` from a fresh instance, stopping at the first error.
    fn execute(
        &mut self,
        word: &Word,
        coverage: Option<&mut (dyn CoverageSink + '_)>,
    ) -> Result<Execution, TargetError>;

    /// Number of executions performed so far.
    fn executions(&self) -> u64;
}

/// A loaded reactive program as a target.
pub struct ProgramTarget {
    program: ReactiveProgram,
    execs: u64,
}

impl ProgramTarget {
    pub fn new(program: ReactiveProgram) -> ProgramTarget {
        ProgramTarget { program, execs: 0 }
    }

    pub fn program(&self) -> &ReactiveProgram {
        &self.program
    }
}

impl Target for ProgramTarget {
    fn inputs(&self) -> &Alphabet {
        self.program.inputs()
    }

    fn outputs(&self) -> &Alphabet {
        self.program.outputs()
    }

    fn execute(
        &mut self,
        word: &Word,
        coverage: Option<&mut (dyn CoverageSink + '_)>,
    ) -> Result<Execution, TargetError> {
        self.execs += 1;
        self.program.execute(word, coverage)
    }

    fn executions(&self) -> u64 {
        self.execs
    }
}

/// A Mealy machine as a target, e.g. a known ground truth for testing the
/// learner, or the explicit-state expansion of a generated problem.
///
/// Transitions whose output is a reserved `error<id>` label halt the
/// execution exactly like a program's error action. Coverage instrumentation
/// reports one synthetic location per (state, input) edge.
pub struct FsmTarget {
    machine: MealyMachine,
    /// error id per output symbol, `None` for ordinary outputs
    error_of_output: Vec<Option<ErrorId>>,
    execs: u64,
}

/// Wraps a machine as a [`Target`] whose behaviour agrees with
/// [`MealyMachine::run`] (up to error truncation).
pub fn wrap_fsm(machine: MealyMachine) -> FsmTarget {
    let error_of_output = machine
        .outputs()
        .labels()
        .map(error_id_of_label)
        .collect();
    FsmTarget {
        machine,
        error_of_output,
        execs: 0,
    }
}

impl FsmTarget {
    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    /// Synthetic instrumentation location of a (state, input) edge: a fixed
    /// mix of the edge index into 16 bits. Collisions are possible for large
    /// machines, exactly like compile-time-random instrumentation.
    fn edge_location(&self, state: u32, input: u16) -> u16 {
        let idx = state as u64 * self.machine.inputs().len() as u64 + input as u64;
        // splitmix64 finalizer
        let mut z = idx.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as u16
    }
}

impl Target for FsmTarget {
    fn inputs(&self) -> &Alphabet {
        self.machine.inputs()
    }

    fn outputs(&self) -> &Alphabet {
        self.machine.outputs()
    }

    fn execute(
        &mut self,
        word: &Word,
        mut coverage: Option<&mut (dyn CoverageSink + '_)>,
    ) -> Result<Execution, TargetError> {
        self.execs += 1;
        for s in word.iter() {
            if !self.machine.inputs().contains_id(s) {
                return Err(TargetError::AlphabetMismatch(s));
            }
        }
        let mut q = self.machine.initial();
        let mut outputs = Word::empty();
        for a in word.iter() {
            let (next, o) = self.machine.step(q, a);
            if let Some(sink) = coverage.as_deref_mut() {
                sink.record_edge(self.edge_location(q, a));
            }
            outputs.push(o);
            if let Some(id) = self.error_of_output[o as usize] {
                return Ok(Execution {
                    outputs,
                    error: Some(id),
                });
            }
            q = next;
        }
        Ok(Execution {
            outputs,
            error: None,
        })
    }

    fn executions(&self) -> u64 {
        self.execs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::{random_machine, SymbolId};
    use crate::util::{rng_from_seed, RngExt};

    #[test]
    fn wrapped_fsm_agrees_with_run() {
        let mut rng = rng_from_seed(11);
        for _ in 0..100 {
            let m = random_machine(&mut rng, 6, 3, 3);
            let mut target = wrap_fsm(m.clone());
            let len = rng.below(10);
            let word: Word = (0..len).map(|_| rng.below(3) as SymbolId).collect();
            let exec = target.execute(&word, None).unwrap();
            assert_eq!(exec.outputs, m.run(&word).unwrap());
            assert_eq!(exec.error, None);
        }
    }

    #[test]
    fn empty_word_executes_to_empty_outputs() {
        let mut rng = rng_from_seed(2);
        let m = random_machine(&mut rng, 3, 2, 2);
        let mut target = wrap_fsm(m);
        let exec = target.execute(&Word::empty(), None).unwrap();
        assert!(exec.outputs.is_empty());
        assert_eq!(target.executions(), 1);
    }

    #[test]
    fn error_labelled_output_halts_and_reports() {
        use crate::fsm::Alphabet;
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["ok", "error9"]).unwrap();
        // q0 -a/ok-> q1, q1 -a/error9-> q1
        let m = MealyMachine::new(inputs, outputs, 2, 0, vec![(1, 0), (1, 1)]).unwrap();
        let mut target = wrap_fsm(m);
        let word = Word::from(vec![0, 0, 0, 0]);
        let exec = target.execute(&word, None).unwrap();
        assert_eq!(exec.error, Some(9));
        assert_eq!(exec.outputs.len(), 2);
    }
}

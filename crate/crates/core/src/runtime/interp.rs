//! Execution of reactive programs: resettable instances and the step loop.

use crate::fsm::{SymbolId, Word};

use super::program::{Action, ReactiveProgram};
use super::{CoverageSink, ErrorId, TargetError};

/// Result of one step: the emitted output, and the error id when the step
/// executed an error action (in which case the output is the reserved error
/// symbol).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepResult {
    pub output: SymbolId,
    pub error: Option<ErrorId>,
}

/// Outputs of a full test execution. On an error, `outputs` is truncated at
/// the erroring step (its last symbol is the reserved error output) and no
/// further input was processed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub outputs: Word,
    pub error: Option<ErrorId>,
}

/// A running copy of a program: current variable valuation, halted flag and
/// the captured-output buffer. Creating or resetting an instance is cheap;
/// this is the in-process analog of forking a pre-initialized target.
#[derive(Debug, Clone)]
pub struct TargetInstance<'p> {
    program: &'p ReactiveProgram,
    vals: Vec<i64>,
    halted: Option<ErrorId>,
    captured: Word,
}

impl<'p> TargetInstance<'p> {
    pub fn new(program: &'p ReactiveProgram) -> TargetInstance<'p> {
        TargetInstance {
            vals: program.vars.iter().map(|v| v.init).collect(),
            halted: None,
            captured: Word::empty(),
            program,
        }
    }

    /// Back to the initial valuation, not halted, output buffer empty.
    pub fn reset(&mut self) {
        for (slot, decl) in self.vals.iter_mut().zip(&self.program.vars) {
            *slot = decl.init;
        }
        self.halted = None;
        self.captured = Word::empty();
    }

    pub fn valuation(&self) -> &[i64] {
        &self.vals
    }

    pub fn halted(&self) -> Option<ErrorId> {
        self.halted
    }

    /// Everything the instance has emitted since the last reset.
    pub fn captured_output(&self) -> &Word {
        &self.captured
    }

    /// Fires the first rule whose guard matches (or the implicit default
    /// rule), applies its assignments, emits its output and reports the
    /// fired rule's instrumentation location to `coverage`.
    pub fn step(
        &mut self,
        input: SymbolId,
        mut coverage: Option<&mut (dyn CoverageSink + '_)>,
    ) -> Result<StepResult, TargetError> {
        if self.halted.is_some() {
            return Err(TargetError::SteppedAfterHalt);
        }
        if !self.program.inputs.contains_id(input) {
            return Err(TargetError::AlphabetMismatch(input));
        }
        let program = self.program;
        for rule in &program.rules {
            if !rule.guard.holds(&self.vals, input) {
                continue;
            }
            // assignments are sequential: later ones see earlier updates
            for (var, expr) in &rule.assigns {
                let raw = expr.eval(&self.vals);
                self.vals[*var] = program.vars[*var].confine(raw, program.overflow);
            }
            if let Some(sink) = coverage.as_deref_mut() {
                sink.record_edge(rule.location_id);
            }
            let result = match rule.action {
                Action::Emit(output) => StepResult {
                    output,
                    error: None,
                },
                Action::Error(id) => {
                    self.halted = Some(id);
                    StepResult {
                        output: program.error_outputs[&id],
                        error: Some(id),
                    }
                }
            };
            self.captured.push(result.output);
            return Ok(result);
        }
        // implicit default rule: emit `invalid`, leave variables unchanged
        if let Some(sink) = coverage.as_deref_mut() {
            sink.record_edge(program.default_location);
        }
        self.captured.push(program.invalid_output);
        Ok(StepResult {
            output: program.invalid_output,
            error: None,
        })
    }
}

impl ReactiveProgram {
    /// Runs `word` on a fresh instance, stopping at the first error; the
    /// instance is discarded afterwards. Equivalent to fork-per-test.
    pub fn execute(
        &self,
        word: &Word,
        mut coverage: Option<&mut (dyn CoverageSink + '_)>,
    ) -> Result<Execution, TargetError> {
        for s in word.iter() {
            if !self.inputs.contains_id(s) {
                return Err(TargetError::AlphabetMismatch(s));
            }
        }
        let mut instance = TargetInstance::new(self);
        let mut outputs = Word::empty();
        for input in word.iter() {
            let step = instance.step(input, coverage.as_deref_mut())?;
            outputs.push(step.output);
            if step.error.is_some() {
                return Ok(Execution {
                    outputs,
                    error: step.error,
                });
            }
        }
        Ok(Execution {
            outputs,
            error: None,
        })
    }
}

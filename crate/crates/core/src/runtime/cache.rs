//! Membership queries with a prefix-tree cache.
//!
//! The cache stores the total Mealy semantics of a target: once a target has
//! halted in an error state, every further input yields the same error output
//! (the error state is absorbing). Queries answered by a cached word, a
//! cached extension, or a cached halt cost zero target executions.

use crate::fsm::{Alphabet, SymbolId, Word};

use super::target::Target;
use super::TargetError;

/// Answers membership queries: the target's total output word for an input
/// word. Implementations count queries and underlying target executions.
pub trait MembershipOracle {
    fn inputs(&self) -> &Alphabet;
    fn outputs(&self) -> &Alphabet;
    fn query(&mut self, word: &Word) -> Result<Word, TargetError>;
    fn queries(&self) -> u64;
    fn executions(&self) -> u64;
}

#[derive(Debug)]
struct TrieNode {
    /// `(input symbol, child index)`, in insertion order; alphabets are
    /// small, so linear scans beat hashing here.
    children: Vec<(SymbolId, u32)>,
    /// Output observed on the edge into this node (unused for the root).
    output: SymbolId,
    /// The target halted when producing `output`; every extension repeats it.
    halted: bool,
}

/// A [`Target`] wrapped with the query cache.
pub struct CachedTarget<T: Target> {
    target: T,
    nodes: Vec<TrieNode>,
    queries: u64,
    hits: u64,
    misses: u64,
}

impl<T: Target> CachedTarget<T> {
    pub fn new(target: T) -> CachedTarget<T> {
        CachedTarget {
            target,
            nodes: vec![TrieNode {
                children: Vec::new(),
                output: 0,
                halted: false,
            }],
            queries: 0,
            hits: 0,
            misses: 0,
        }
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn target_mut(&mut self) -> &mut T {
        &mut self.target
    }

    pub fn into_inner(self) -> T {
        self.target
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    fn child(&self, node: u32, symbol: SymbolId) -> Option<u32> {
        self.nodes[node as usize]
            .children
            .iter()
            .find(|(s, _)| *s == symbol)
            .map(|(_, c)| *c)
    }

    /// Tries to assemble the answer from the trie alone.
    fn lookup(&self, word: &Word) -> Option<Word> {
        let mut node = 0u32;
        let mut outputs = Word::empty();
        for symbol in word.iter() {
            if self.nodes[node as usize].halted {
                outputs.push(self.nodes[node as usize].output);
                continue;
            }
            let child = self.child(node, symbol)?;
            outputs.push(self.nodes[child as usize].output);
            node = child;
        }
        Some(outputs)
    }

    /// Stores an observed (input, padded-output) pair, verifying consistency
    /// with everything recorded earlier.
    fn insert(
        &mut self,
        word: &Word,
        outputs: &Word,
        halt_position: Option<usize>,
    ) -> Result<(), TargetError> {
        let mut node = 0u32;
        for (i, symbol) in word.iter().enumerate() {
            let expected = outputs.get(i);
            if self.nodes[node as usize].halted {
                // the absorbing error output must repeat
                if self.nodes[node as usize].output != expected {
                    return Err(TargetError::Nondeterminism { position: i });
                }
                continue;
            }
            match self.child(node, symbol) {
                Some(child) => {
                    if self.nodes[child as usize].output != expected {
                        return Err(TargetError::Nondeterminism { position: i });
                    }
                    node = child;
                }
                None => {
                    let fresh = self.nodes.len() as u32;
                    self.nodes.push(TrieNode {
                        children: Vec::new(),
                        output: expected,
                        halted: false,
                    });
                    self.nodes[node as usize].children.push((symbol, fresh));
                    node = fresh;
                }
            }
            if halt_position == Some(i) {
                self.nodes[node as usize].halted = true;
            }
        }
        Ok(())
    }
}

impl<T: Target> MembershipOracle for CachedTarget<T> {
    fn inputs(&self) -> &Alphabet {
        self.target.inputs()
    }

    fn outputs(&self) -> &Alphabet {
        self.target.outputs()
    }

    fn query(&mut self, word: &Word) -> Result<Word, TargetError> {
        self.queries += 1;
        if let Some(outputs) = self.lookup(word) {
            self.hits += 1;
            return Ok(outputs);
        }
        self.misses += 1;
        let exec = self.target.execute(word, None)?;
        // pad to total semantics: after an error the error output repeats
        let mut outputs = exec.outputs;
        let halt_position = exec.error.map(|_| outputs.len() - 1);
        if exec.error.is_some() {
            let pad = outputs.last().expect("an error step emits an output");
            while outputs.len() < word.len() {
                outputs.push(pad);
            }
        }
        debug_assert_eq!(outputs.len(), word.len());
        self.insert(word, &outputs, halt_position)?;
        Ok(outputs)
    }

    fn queries(&self) -> u64 {
        self.queries
    }

    fn executions(&self) -> u64 {
        self.target.executions()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::{random_machine, Word};
    use crate::runtime::{wrap_fsm, ReactiveProgram};
    use crate::util::{rng_from_seed, RngExt};

    #[test]
    fn repeated_query_costs_no_execution() {
        let mut rng = rng_from_seed(4);
        let m = random_machine(&mut rng, 5, 2, 2);
        let mut cached = CachedTarget::new(wrap_fsm(m));
        let w = Word::from(vec![0, 1, 1, 0]);
        let first = cached.query(&w).unwrap();
        assert_eq!(cached.executions(), 1);
        let second = cached.query(&w).unwrap();
        assert_eq!(first, second);
        assert_eq!(cached.executions(), 1, "second answer must come from cache");
        assert_eq!(cached.hits(), 1);
    }

    #[test]
    fn prefix_of_cached_word_is_served() {
        let mut rng = rng_from_seed(5);
        let m = random_machine(&mut rng, 5, 2, 2);
        let mut cached = CachedTarget::new(wrap_fsm(m));
        let w = Word::from(vec![0, 1, 0, 1, 1]);
        let full = cached.query(&w).unwrap();
        let prefix = cached.query(&w.prefix(3)).unwrap();
        assert_eq!(prefix, full.prefix(3));
        assert_eq!(cached.executions(), 1);
    }

    #[test]
    fn execution_count_equals_cache_misses() {
        let mut rng = rng_from_seed(6);
        let m = random_machine(&mut rng, 8, 3, 3);
        let mut cached = CachedTarget::new(wrap_fsm(m));
        for _ in 0..1000 {
            let len = rng.below(8);
            let w: Word = (0..len).map(|_| rng.below(3) as u16).collect();
            cached.query(&w).unwrap();
        }
        assert_eq!(cached.executions(), cached.misses());
        assert_eq!(cached.queries(), 1000);
        assert_eq!(cached.hits() + cached.misses(), 1000);
    }

    #[test]
    fn error_outputs_pad_to_total_semantics() {
        let text = "inputs: a b\noutputs: x\nrule in == a -> ; error 3\n";
        let p = ReactiveProgram::parse(text, 0).unwrap();
        let err_sym = p.error_outputs()[&3];
        let inv = p.invalid_output();
        let mut cached = CachedTarget::new(crate::runtime::ProgramTarget::new(p));
        // b a b b: invalid, then error3 absorbing
        let w = Word::from(vec![1, 0, 1, 1]);
        let out = cached.query(&w).unwrap();
        assert_eq!(out, Word::from(vec![inv, err_sym, err_sym, err_sym]));
        // an extension is answered from the cache (absorbing halt)
        let w2 = Word::from(vec![1, 0, 1, 1, 0, 0]);
        let out2 = cached.query(&w2).unwrap();
        assert_eq!(out2.last(), Some(err_sym));
        assert_eq!(cached.executions(), 1);
    }
}

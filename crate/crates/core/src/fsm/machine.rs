use std::collections::VecDeque;

use thiserror::Error;

use super::{Alphabet, SymbolId, Word};

/// Dense index of a state.
pub type StateId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsmError {
    #[error("symbol {0} is not in the machine's input alphabet")]
    AlphabetMismatch(SymbolId),
    #[error("the two machines have different input alphabets")]
    InputAlphabetsDiffer,
    #[error("state {0} is not reachable from the initial state")]
    UnreachableState(StateId),
    #[error("state {0} out of range (machine has {1} states)")]
    BadState(StateId, u32),
    #[error("transition table has the wrong shape: expected {expected} entries, got {got}")]
    BadTableShape { expected: usize, got: usize },
    #[error("transition target {0} out of range")]
    BadTarget(StateId),
    #[error("output symbol {0} is not in the output alphabet")]
    BadOutput(SymbolId),
}

/// A deterministic, complete Mealy machine.
///
/// States are dense indices; the transition and output tables are stored
/// row-major (`state * |inputs| + input`), which keeps [`MealyMachine::run`]
/// a pair of array lookups per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    inputs: Alphabet,
    outputs: Alphabet,
    initial: StateId,
    n_states: u32,
    next: Vec<StateId>,
    out: Vec<SymbolId>,
}

impl MealyMachine {
    /// Builds a machine from explicit tables. `transitions[q * k + a]` is the
    /// `(target, output)` of state `q` on input `a`; completeness is implied
    /// by the table shape.
    pub fn new(
        inputs: Alphabet,
        outputs: Alphabet,
        n_states: u32,
        initial: StateId,
        transitions: Vec<(StateId, SymbolId)>,
    ) -> Result<MealyMachine, FsmError> {
        let k = inputs.len();
        let expected = n_states as usize * k;
        if transitions.len() != expected {
            return Err(FsmError::BadTableShape {
                expected,
                got: transitions.len(),
            });
        }
        if initial >= n_states {
            return Err(FsmError::BadState(initial, n_states));
        }
        let mut next = Vec::with_capacity(expected);
        let mut out = Vec::with_capacity(expected);
        for (target, output) in transitions {
            if target >= n_states {
                return Err(FsmError::BadTarget(target));
            }
            if !outputs.contains_id(output) {
                return Err(FsmError::BadOutput(output));
            }
            next.push(target);
            out.push(output);
        }
        Ok(MealyMachine {
            inputs,
            outputs,
            initial,
            n_states,
            next,
            out,
        })
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_count(&self) -> u32 {
        self.n_states
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.n_states
    }

    #[inline]
    fn idx(&self, state: StateId, input: SymbolId) -> usize {
        state as usize * self.inputs.len() + input as usize
    }

    /// One transition step: `(δ(q, a), λ(q, a))`.
    #[inline]
    pub fn step(&self, state: StateId, input: SymbolId) -> (StateId, SymbolId) {
        let i = self.idx(state, input);
        (self.next[i], self.out[i])
    }

    pub fn successor(&self, state: StateId, input: SymbolId) -> StateId {
        self.next[self.idx(state, input)]
    }

    pub fn output(&self, state: StateId, input: SymbolId) -> SymbolId {
        self.out[self.idx(state, input)]
    }

    fn check_word(&self, word: &Word) -> Result<(), FsmError> {
        for s in word.iter() {
            if !self.inputs.contains_id(s) {
                return Err(FsmError::AlphabetMismatch(s));
            }
        }
        Ok(())
    }

    /// The characterization function: the output word produced from the
    /// initial state. Always the same length as the input word.
    pub fn run(&self, word: &Word) -> Result<Word, FsmError> {
        self.run_from(self.initial, word)
    }

    /// The output word produced when starting in `state`.
    pub fn run_from(&self, state: StateId, word: &Word) -> Result<Word, FsmError> {
        if state >= self.n_states {
            return Err(FsmError::BadState(state, self.n_states));
        }
        self.check_word(word)?;
        let mut q = state;
        let mut outputs = Word::empty();
        for a in word.iter() {
            let (next, o) = self.step(q, a);
            outputs.push(o);
            q = next;
        }
        Ok(outputs)
    }

    /// The state reached from `state` after reading `word`.
    pub fn state_after(&self, state: StateId, word: &Word) -> Result<StateId, FsmError> {
        if state >= self.n_states {
            return Err(FsmError::BadState(state, self.n_states));
        }
        self.check_word(word)?;
        let mut q = state;
        for a in word.iter() {
            q = self.successor(q, a);
        }
        Ok(q)
    }

    /// BFS tree from the initial state, exploring inputs in id order.
    /// Entry `q` is `None` when `q` is unreachable.
    fn bfs_parents(&self) -> Vec<Option<Reach>> {
        let mut parents: Vec<Option<Reach>> = vec![None; self.n_states as usize];
        let mut queue = VecDeque::new();
        parents[self.initial as usize] = Some(Reach::Root);
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            for a in self.inputs.ids() {
                let t = self.successor(q, a);
                if parents[t as usize].is_none() {
                    parents[t as usize] = Some(Reach::Via(q, a));
                    queue.push_back(t);
                }
            }
        }
        parents
    }

    /// Shortest access sequences for all states, ties broken by lowest input
    /// id. The set of defined entries is prefix-closed (it forms a BFS tree).
    pub fn access_sequences(&self) -> Vec<Option<Word>> {
        let parents = self.bfs_parents();
        let mut words: Vec<Option<Word>> = vec![None; self.n_states as usize];
        for q in 0..self.n_states {
            if parents[q as usize].is_none() {
                continue;
            }
            let mut rev = Vec::new();
            let mut cur = q;
            loop {
                match parents[cur as usize] {
                    Some(Reach::Via(p, a)) => {
                        rev.push(a);
                        cur = p;
                    }
                    Some(Reach::Root) => break,
                    None => unreachable!("parent chain stays within the BFS tree"),
                }
            }
            rev.reverse();
            words[q as usize] = Some(Word::from(rev));
        }
        words
    }

    /// Shortest access sequence of one state.
    pub fn access_sequence(&self, state: StateId) -> Result<Word, FsmError> {
        if state >= self.n_states {
            return Err(FsmError::BadState(state, self.n_states));
        }
        self.access_sequences()[state as usize]
            .clone()
            .ok_or(FsmError::UnreachableState(state))
    }

    pub fn reachable_states(&self) -> Vec<StateId> {
        self.bfs_parents()
            .iter()
            .enumerate()
            .filter_map(|(q, p)| p.as_ref().map(|_| q as StateId))
            .collect()
    }

    /// Access sequences of all reachable states, in state order. Prefix-closed.
    pub fn state_cover(&self) -> Vec<Word> {
        self.access_sequences().into_iter().flatten().collect()
    }

    /// The state cover extended by every input symbol.
    pub fn transition_cover(&self) -> Vec<Word> {
        let mut cover = Vec::new();
        for w in self.state_cover() {
            for a in self.inputs.ids() {
                cover.push(w.with(a));
            }
        }
        cover
    }

    /// Shortest word (lex-min on ties) whose outputs differ when run from
    /// `q1` and `q2`, or `None` when the two states are equivalent.
    pub fn find_discriminator(&self, q1: StateId, q2: StateId) -> Result<Option<Word>, FsmError> {
        if q1 >= self.n_states {
            return Err(FsmError::BadState(q1, self.n_states));
        }
        if q2 >= self.n_states {
            return Err(FsmError::BadState(q2, self.n_states));
        }
        Ok(product_search(self, self, q1, q2))
    }

    /// Behavioural equivalence via synchronized product exploration.
    /// `Ok(None)` means equivalent; `Ok(Some(w))` is a shortest word on which
    /// the outputs differ (lex-min among shortest, and the disagreement is at
    /// its final symbol).
    pub fn equivalent(&self, other: &MealyMachine) -> Result<Option<Word>, FsmError> {
        if self.inputs != other.inputs {
            return Err(FsmError::InputAlphabetsDiffer);
        }
        Ok(product_search(self, other, self.initial, other.initial))
    }

    /// Canonical minimal machine: unreachable states dropped, equivalent
    /// states merged, states renumbered in BFS discovery order.
    pub fn minimize(&self) -> MealyMachine {
        let k = self.inputs.len();
        let reachable = self.reachable_states();
        let mut dense: Vec<Option<u32>> = vec![None; self.n_states as usize];
        for (i, &q) in reachable.iter().enumerate() {
            dense[q as usize] = Some(i as u32);
        }
        let n = reachable.len();

        // Moore-style partition refinement on the reachable part, starting
        // from the output-row partition.
        let mut class: Vec<u32> = vec![0; n];
        {
            let mut sig_map = std::collections::HashMap::new();
            for (i, &q) in reachable.iter().enumerate() {
                let row: Vec<SymbolId> =
                    (0..k).map(|a| self.out[q as usize * k + a]).collect();
                let next_id = sig_map.len() as u32;
                class[i] = *sig_map.entry(row).or_insert(next_id);
            }
        }
        loop {
            let mut sig_map = std::collections::HashMap::new();
            let mut new_class = vec![0u32; n];
            for (i, &q) in reachable.iter().enumerate() {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[i]);
                for a in 0..k {
                    let t = self.next[q as usize * k + a];
                    sig.push(class[dense[t as usize].unwrap() as usize]);
                }
                let next_id = sig_map.len() as u32;
                new_class[i] = *sig_map.entry(sig).or_insert(next_id);
            }
            if new_class == class {
                break;
            }
            class = new_class;
        }

        // Renumber classes by BFS over class representatives so the result
        // is canonical for a given behaviour.
        let class_of = |q: StateId| class[dense[q as usize].unwrap() as usize];
        let n_classes = class.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut order: Vec<Option<u32>> = vec![None; n_classes];
        let mut rep: Vec<StateId> = vec![0; n_classes];
        let mut bfs = VecDeque::new();
        let mut count = 0u32;
        let init_class = class_of(self.initial) as usize;
        order[init_class] = Some(count);
        rep[init_class] = self.initial;
        count += 1;
        bfs.push_back(init_class);
        while let Some(c) = bfs.pop_front() {
            let q = rep[c];
            for a in 0..k {
                let t = self.next[q as usize * k + a];
                let tc = class_of(t) as usize;
                if order[tc].is_none() {
                    order[tc] = Some(count);
                    rep[tc] = t;
                    count += 1;
                    bfs.push_back(tc);
                }
            }
        }

        let mut transitions = vec![(0u32, 0u16); count as usize * k];
        for c in 0..n_classes {
            let Some(new_id) = order[c] else { continue };
            let q = rep[c];
            for a in 0..k {
                let t = self.next[q as usize * k + a];
                let o = self.out[q as usize * k + a];
                transitions[new_id as usize * k + a] = (order[class_of(t) as usize].unwrap(), o);
            }
        }
        MealyMachine::new(self.inputs.clone(), self.outputs.clone(), count, 0, transitions)
            .expect("minimized table is well formed")
    }

    /// True when every state is reachable and no two states are equivalent.
    pub fn is_minimal(&self) -> bool {
        let m = self.minimize();
        m.state_count() == self.state_count()
    }
}

/// How a state was first reached in the BFS tree.
#[derive(Debug, Clone, Copy)]
enum Reach {
    Root,
    Via(StateId, SymbolId),
}

/// Synchronized BFS over the product of two machines starting from the given
/// state pair. Returns a shortest word on which the output functions differ
/// (lex-min among shortest, inputs explored in id order), or `None` if the
/// two start states are behaviourally equivalent.
///
/// Both machines must share the input alphabet size; callers guarantee this.
fn product_search(
    m1: &MealyMachine,
    m2: &MealyMachine,
    start1: StateId,
    start2: StateId,
) -> Option<Word> {
    let k = m1.inputs.len();
    debug_assert_eq!(k, m2.inputs.len());
    // Output alphabets may differ between machines (e.g. after a DOT
    // round-trip drops unused symbols); translate m2's output ids into m1's
    // id space by label. Labels absent from m1 map to a sentinel that never
    // compares equal.
    let translate: Option<Vec<SymbolId>> = if m1.outputs == m2.outputs {
        None
    } else {
        Some(
            m2.outputs
                .labels()
                .map(|l| m1.outputs.id_of(l).unwrap_or(SymbolId::MAX))
                .collect(),
        )
    };
    let n2 = m2.n_states as usize;
    let pair_index = |p: StateId, q: StateId| p as usize * n2 + q as usize;

    let total = m1.n_states as usize * n2;
    let mut seen = vec![false; total];
    // parent edge per visited pair, for counterexample reconstruction
    let mut parent: Vec<(u32, SymbolId)> = vec![(u32::MAX, 0); total];
    let mut queue = VecDeque::new();

    let start = pair_index(start1, start2);
    seen[start] = true;
    queue.push_back((start1, start2));

    while let Some((p, q)) = queue.pop_front() {
        for a in 0..k as SymbolId {
            let (tp, op) = m1.step(p, a);
            let (tq, mut oq) = m2.step(q, a);
            if let Some(map) = &translate {
                oq = map[oq as usize];
            }
            if op != oq {
                // reconstruct the access word of (p, q), then append a
                let mut rev = vec![a];
                let mut cur = pair_index(p, q);
                while cur != start {
                    let (prev, sym) = parent[cur];
                    rev.push(sym);
                    cur = prev as usize;
                }
                rev.reverse();
                return Some(Word::from(rev));
            }
            let t = pair_index(tp, tq);
            if !seen[t] {
                seen[t] = true;
                parent[t] = (pair_index(p, q) as u32, a);
                queue.push_back((tp, tq));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_state_cycle() -> MealyMachine {
        // q0 --a/x--> q1 --a/y--> q0
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x", "y"]).unwrap();
        MealyMachine::new(inputs, outputs, 2, 0, vec![(1, 0), (0, 1)]).unwrap()
    }

    fn three_state_machine() -> MealyMachine {
        // inputs a,b; outputs x,y
        let inputs = Alphabet::new(["a", "b"]).unwrap();
        let outputs = Alphabet::new(["x", "y"]).unwrap();
        // q0: a->q1/x, b->q0/x ; q1: a->q2/x, b->q0/y ; q2: a->q2/y, b->q1/x
        MealyMachine::new(
            inputs,
            outputs,
            3,
            0,
            vec![(1, 0), (0, 0), (2, 0), (0, 1), (2, 1), (1, 0)],
        )
        .unwrap()
    }

    #[test]
    fn empty_word_gives_empty_output() {
        let m = two_state_cycle();
        assert_eq!(m.run(&Word::empty()).unwrap(), Word::empty());
    }

    #[test]
    fn single_state_machine_is_constant() {
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x"]).unwrap();
        let m = MealyMachine::new(inputs, outputs, 1, 0, vec![(0, 0)]).unwrap();
        let w = Word::from(vec![0, 0, 0]);
        assert_eq!(m.run(&w).unwrap(), Word::from(vec![0, 0, 0]));
    }

    #[test]
    fn run_rejects_foreign_symbols() {
        let m = two_state_cycle();
        let w = Word::from(vec![5]);
        assert_eq!(m.run(&w).unwrap_err(), FsmError::AlphabetMismatch(5));
    }

    #[test]
    fn output_length_matches_input_length() {
        let m = three_state_machine();
        let w = Word::from(vec![0, 1, 0, 0, 1, 1]);
        assert_eq!(m.run(&w).unwrap().len(), w.len());
    }

    #[test]
    fn access_sequence_of_initial_is_empty() {
        let m = three_state_machine();
        assert_eq!(m.access_sequence(0).unwrap(), Word::empty());
    }

    #[test]
    fn access_sequence_of_cycle() {
        let m = two_state_cycle();
        assert_eq!(m.access_sequence(1).unwrap(), Word::from(vec![0]));
    }

    #[test]
    fn unreachable_state_is_reported() {
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x"]).unwrap();
        // q1 unreachable
        let m = MealyMachine::new(inputs, outputs, 2, 0, vec![(0, 0), (0, 0)]).unwrap();
        assert_eq!(m.access_sequence(1).unwrap_err(), FsmError::UnreachableState(1));
        assert_eq!(m.state_cover().len(), 1);
    }

    #[test]
    fn identical_rows_have_no_discriminator() {
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x"]).unwrap();
        // two states that behave identically
        let m = MealyMachine::new(inputs, outputs, 2, 0, vec![(1, 0), (0, 0)]).unwrap();
        assert_eq!(m.find_discriminator(0, 1).unwrap(), None);
    }

    #[test]
    fn length_one_discriminator() {
        let m = two_state_cycle();
        // q0 outputs x on a, q1 outputs y on a
        assert_eq!(m.find_discriminator(0, 1).unwrap(), Some(Word::from(vec![0])));
    }

    #[test]
    fn machine_equivalent_to_itself() {
        let m = three_state_machine();
        assert_eq!(m.equivalent(&m).unwrap(), None);
    }

    #[test]
    fn minimization_preserves_equivalence() {
        let m = three_state_machine();
        let min = m.minimize();
        assert_eq!(m.equivalent(&min).unwrap(), None);
    }

    #[test]
    fn flipped_output_is_detected_with_shortest_word() {
        let m = three_state_machine();
        // flip output of q2 on b (reachable via "a a")
        let inputs = m.inputs().clone();
        let outputs = m.outputs().clone();
        let m2 = MealyMachine::new(
            inputs,
            outputs,
            3,
            0,
            vec![(1, 0), (0, 0), (2, 0), (0, 1), (2, 1), (1, 1)],
        )
        .unwrap();
        let ce = m.equivalent(&m2).unwrap().unwrap();
        assert_eq!(ce, Word::from(vec![0, 0, 1])); // a a b
        // disagreement is at the last symbol
        let o1 = m.run(&ce).unwrap();
        let o2 = m2.run(&ce).unwrap();
        assert_ne!(o1.last(), o2.last());
        assert_eq!(o1.prefix(ce.len() - 1), o2.prefix(ce.len() - 1));
    }

    #[test]
    fn transition_cover_of_one_state_machine() {
        let inputs = Alphabet::new(["a", "b"]).unwrap();
        let outputs = Alphabet::new(["x"]).unwrap();
        let m = MealyMachine::new(inputs, outputs, 1, 0, vec![(0, 0), (0, 0)]).unwrap();
        assert_eq!(m.state_cover(), vec![Word::empty()]);
        assert_eq!(
            m.transition_cover(),
            vec![Word::from(vec![0]), Word::from(vec![1])]
        );
    }

    #[test]
    fn minimize_merges_duplicate_states() {
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x", "y"]).unwrap();
        // q0 -a/x-> q1, q1 -a/y-> q2, q2 behaves like q0
        let m = MealyMachine::new(
            inputs,
            outputs,
            4,
            0,
            vec![(1, 0), (2, 1), (3, 0), (2, 1)],
        )
        .unwrap();
        let min = m.minimize();
        assert_eq!(min.state_count(), 2);
        assert_eq!(min.equivalent(&m).unwrap(), None);
    }
}

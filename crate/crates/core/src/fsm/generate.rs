//! Random Mealy machine generation for tests, benchmarks and demos.

use crate::util::{ChaCha12Rng, RngExt};

use super::{Alphabet, MealyMachine, StateId, SymbolId};

/// Input alphabet `a, b, c, ...` with single-character labels (k ≤ 26).
pub(crate) fn letter_inputs(k: usize) -> Alphabet {
    assert!(k >= 1 && k <= 26, "input alphabet size must be in 1..=26");
    Alphabet::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string()))
        .expect("letter labels are valid")
}

/// Output alphabet `0, 1, 2, ...` with digit-first labels.
pub(crate) fn digit_outputs(k: usize) -> Alphabet {
    assert!(k >= 1, "output alphabet must be nonempty");
    Alphabet::new((0..k).map(|i| i.to_string())).expect("digit labels are valid")
}

/// A uniformly random complete machine over letter inputs and digit outputs.
/// Not necessarily reachable or minimal.
pub fn random_machine(
    rng: &mut ChaCha12Rng,
    n_states: u32,
    n_inputs: usize,
    n_outputs: usize,
) -> MealyMachine {
    let inputs = letter_inputs(n_inputs);
    let outputs = digit_outputs(n_outputs);
    let mut transitions = Vec::with_capacity(n_states as usize * n_inputs);
    for _ in 0..n_states {
        for _ in 0..n_inputs {
            let target = rng.below(n_states as usize) as StateId;
            let output = rng.below(n_outputs) as SymbolId;
            transitions.push((target, output));
        }
    }
    MealyMachine::new(inputs, outputs, n_states, 0, transitions)
        .expect("random table is well formed")
}

/// A random machine that is reachable and minimal with exactly `n_states`
/// states. Retries until the random draw qualifies; for the sizes used in
/// tests (n up to a few hundred, ≥ 2 outputs) a handful of draws suffices.
pub fn random_minimal_machine(
    rng: &mut ChaCha12Rng,
    n_states: u32,
    n_inputs: usize,
    n_outputs: usize,
) -> MealyMachine {
    assert!(n_states >= 1);
    assert!(
        n_outputs >= 2 || n_states == 1,
        "a machine with one output has at most one distinguishable state"
    );
    loop {
        let m = random_machine(rng, n_states, n_inputs, n_outputs);
        if m.reachable_states().len() == n_states as usize && m.is_minimal() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng_from_seed;

    #[test]
    fn minimal_generator_hits_requested_size() {
        let mut rng = rng_from_seed(42);
        for &n in &[1u32, 2, 5, 13, 40] {
            let m = random_minimal_machine(&mut rng, n, 3, 3);
            assert_eq!(m.state_count(), n);
            assert_eq!(m.reachable_states().len(), n as usize);
            assert!(m.is_minimal());
        }
    }

    #[test]
    fn state_cover_counts_reachable_states() {
        let mut rng = rng_from_seed(7);
        for _ in 0..20 {
            let m = random_machine(&mut rng, 20, 2, 2);
            assert_eq!(m.state_cover().len(), m.reachable_states().len());
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = random_minimal_machine(&mut rng_from_seed(9), 17, 4, 3);
        let b = random_minimal_machine(&mut rng_from_seed(9), 17, 4, 3);
        assert_eq!(a, b);
    }
}

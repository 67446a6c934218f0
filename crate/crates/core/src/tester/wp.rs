//! Wp-method machinery: per-state discriminator sets and the deterministic
//! `S · I^l · E_q` suite.

use std::collections::VecDeque;

use crate::fsm::{MealyMachine, StateId, SymbolId, Word};

use super::{TestError, DEFAULT_SUITE_CAP};

/// Everything the Wp method needs about one hypothesis: covers and pairwise
/// discriminator sets. Building it fails when the hypothesis is not minimal.
#[derive(Debug, Clone)]
pub struct WpContext {
    hypothesis: MealyMachine,
    state_cover: Vec<Word>,
    transition_cover: Vec<Word>,
    /// Per-state discriminator sets `E_q`: for every other state some member
    /// distinguishes the pair on the hypothesis. Sorted by (length, lex).
    e_sets: Vec<Vec<Word>>,
    /// Union of all `E_q`.
    global_e: Vec<Word>,
}

impl WpContext {
    /// Builds covers and pairwise-shortest discriminator sets (ties broken
    /// lexicographically by input id).
    ///
    /// Uses one backward BFS over the unordered-pair graph instead of a
    /// per-pair product search; `distinguishing_word` below reconstructs the
    /// same words [`MealyMachine::find_discriminator`] would return.
    pub fn build(hypothesis: &MealyMachine) -> Result<WpContext, TestError> {
        let n = hypothesis.state_count() as usize;
        let k = hypothesis.inputs().len();
        let pair = |p: usize, q: usize| {
            debug_assert_ne!(p, q);
            if p < q {
                p * n + q
            } else {
                q * n + p
            }
        };

        // dist[P] = length of the shortest word distinguishing the pair
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for p in 0..n {
            for q in (p + 1)..n {
                let direct = (0..k as SymbolId).any(|a| {
                    hypothesis.output(p as StateId, a) != hypothesis.output(q as StateId, a)
                });
                if direct {
                    dist[pair(p, q)] = 1;
                    queue.push_back((p, q));
                }
            }
        }
        // reverse edges: which pairs step into a given pair
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n * n];
        for p in 0..n {
            for q in (p + 1)..n {
                for a in 0..k as SymbolId {
                    let tp = hypothesis.successor(p as StateId, a) as usize;
                    let tq = hypothesis.successor(q as StateId, a) as usize;
                    if tp != tq {
                        preds[pair(tp, tq)].push(pair(p, q) as u32);
                    }
                }
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let d = dist[pair(p, q)];
            for &pred in &preds[pair(p, q)] {
                if dist[pred as usize] == u32::MAX {
                    dist[pred as usize] = d + 1;
                    queue.push_back((pred as usize / n, pred as usize % n));
                }
            }
        }

        // lex-min shortest word for a pair, walked greedily along dist
        let distinguishing_word = |mut p: usize, mut q: usize| -> Result<Word, TestError> {
            let mut word = Word::empty();
            let mut d = dist[pair(p, q)];
            if d == u32::MAX {
                return Err(TestError::IndistinguishableStates(p as StateId, q as StateId));
            }
            while d > 1 {
                let mut advanced = false;
                for a in 0..k as SymbolId {
                    let tp = hypothesis.successor(p as StateId, a) as usize;
                    let tq = hypothesis.successor(q as StateId, a) as usize;
                    if tp != tq && dist[pair(tp, tq)] == d - 1 {
                        word.push(a);
                        p = tp;
                        q = tq;
                        d -= 1;
                        advanced = true;
                        break;
                    }
                }
                debug_assert!(advanced, "distance table is consistent");
            }
            let last = (0..k as SymbolId)
                .find(|&a| hypothesis.output(p as StateId, a) != hypothesis.output(q as StateId, a))
                .expect("distance-1 pairs differ on some input");
            word.push(last);
            Ok(word)
        };

        let mut e_sets: Vec<Vec<Word>> = vec![Vec::new(); n];
        for p in 0..n {
            for q in (p + 1)..n {
                let w = distinguishing_word(p, q)?;
                e_sets[p].push(w.clone());
                e_sets[q].push(w);
            }
        }
        let by_len_lex = |a: &Word, b: &Word| a.len().cmp(&b.len()).then_with(|| a.cmp(b));
        let mut global_e: Vec<Word> = Vec::new();
        for set in &mut e_sets {
            set.sort_by(by_len_lex);
            set.dedup();
            global_e.extend(set.iter().cloned());
        }
        global_e.sort_by(by_len_lex);
        global_e.dedup();

        Ok(WpContext {
            state_cover: hypothesis.state_cover(),
            transition_cover: hypothesis.transition_cover(),
            hypothesis: hypothesis.clone(),
            e_sets,
            global_e,
        })
    }

    pub fn hypothesis(&self) -> &MealyMachine {
        &self.hypothesis
    }

    pub fn state_cover(&self) -> &[Word] {
        &self.state_cover
    }

    pub fn transition_cover(&self) -> &[Word] {
        &self.transition_cover
    }

    pub fn e_set(&self, state: StateId) -> &[Word] {
        &self.e_sets[state as usize]
    }

    pub fn global_e(&self) -> &[Word] {
        &self.global_e
    }
}

/// Lazy enumeration of the deterministic suite `u · v · w` for `u` in the
/// transition cover, `v ∈ I^l` with `l = m - n + 1`, and `w ∈ E_q` for the
/// state `q` reached by `u·v`. When `E_q` is empty the bare `u·v` is yielded.
#[derive(Debug)]
pub struct WpSuite<'c> {
    ctx: &'c WpContext,
    l: usize,
    cover_idx: usize,
    /// odometer over I^l, least-significant digit last (lex order)
    infix: Vec<SymbolId>,
    infix_done: bool,
    suffix_idx: usize,
}

/// Builds the suite for bound `m ≥ n` with the default size cap.
pub fn deterministic_wp_suite(ctx: &WpContext, m: u32) -> Result<WpSuite<'_>, TestError> {
    deterministic_wp_suite_with_cap(ctx, m, Some(DEFAULT_SUITE_CAP))
}

/// Like [`deterministic_wp_suite`] with an explicit cap (`None` disables the
/// size check entirely).
pub fn deterministic_wp_suite_with_cap(
    ctx: &WpContext,
    m: u32,
    cap: Option<u128>,
) -> Result<WpSuite<'_>, TestError> {
    let n = ctx.hypothesis.state_count();
    if m < n {
        return Err(TestError::BoundBelowHypothesis { m, n });
    }
    let l = (m - n + 1) as usize;
    if let Some(cap) = cap {
        let size = suite_size(ctx, l);
        if size > cap {
            return Err(TestError::SuiteTooLarge { size, cap });
        }
    }
    Ok(WpSuite {
        ctx,
        l,
        cover_idx: 0,
        infix: vec![0; l],
        infix_done: false,
        suffix_idx: 0,
    })
}

/// Exact suite size, by dynamic programming over `l` transition steps.
pub fn suite_size(ctx: &WpContext, l: usize) -> u128 {
    let hyp = &ctx.hypothesis;
    let n = hyp.state_count() as usize;
    let k = hyp.inputs().len();
    // words contributed once the infix has been consumed, per current state
    let mut contrib: Vec<u128> = (0..n)
        .map(|q| ctx.e_sets[q].len().max(1) as u128)
        .collect();
    for _ in 0..l {
        let mut next = vec![0u128; n];
        for q in 0..n {
            for a in 0..k as SymbolId {
                next[q] = next[q].saturating_add(contrib[hyp.successor(q as StateId, a) as usize]);
            }
        }
        contrib = next;
    }
    ctx.transition_cover
        .iter()
        .map(|u| {
            let q = ctx
                .hypothesis
                .state_after(0, u)
                .expect("cover words are over the hypothesis alphabet");
            contrib[q as usize]
        })
        .fold(0u128, |acc, c| acc.saturating_add(c))
}

impl<'c> Iterator for WpSuite<'c> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            if self.cover_idx >= self.ctx.transition_cover.len() {
                return None;
            }
            if self.infix_done {
                self.infix_done = false;
                self.infix.fill(0);
                self.cover_idx += 1;
                continue;
            }
            let u = &self.ctx.transition_cover[self.cover_idx];
            let mut word = u.clone();
            for &a in &self.infix {
                word.push(a);
            }
            let q = self
                .ctx
                .hypothesis
                .state_after(0, &word)
                .expect("suite words are over the hypothesis alphabet");
            let suffixes = &self.ctx.e_sets[q as usize];

            let exhausted_suffixes = if suffixes.is_empty() {
                self.suffix_idx = 1; // the bare u·v counts as the only word
                true
            } else {
                word.extend(&suffixes[self.suffix_idx]);
                self.suffix_idx += 1;
                self.suffix_idx >= suffixes.len()
            };
            if exhausted_suffixes {
                self.suffix_idx = 0;
                // advance the infix odometer (lex order, last digit fastest)
                let k = self.ctx.hypothesis.inputs().len() as SymbolId;
                let mut digit = self.l;
                loop {
                    if digit == 0 {
                        self.infix_done = true;
                        break;
                    }
                    digit -= 1;
                    self.infix[digit] += 1;
                    if self.infix[digit] < k {
                        break;
                    }
                    self.infix[digit] = 0;
                }
                if self.l == 0 {
                    self.infix_done = true;
                }
            }
            return Some(word);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::{random_minimal_machine, Alphabet};
    use crate::util::rng_from_seed;

    fn single_state(k: usize) -> MealyMachine {
        let inputs = Alphabet::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string())).unwrap();
        let outputs = Alphabet::new(["x"]).unwrap();
        MealyMachine::new(inputs, outputs, 1, 0, vec![(0, 0); k]).unwrap()
    }

    #[test]
    fn one_state_hypothesis_has_empty_discriminator_sets() {
        let m = single_state(2);
        let ctx = WpContext::build(&m).unwrap();
        assert!(ctx.e_set(0).is_empty());
        assert!(ctx.global_e().is_empty());
    }

    #[test]
    fn suite_for_one_state_m_equals_n() {
        // S = {ε}, S·I = {a, b}, l = 1 → words a·a, a·b, b·a, b·b
        let m = single_state(2);
        let ctx = WpContext::build(&m).unwrap();
        let words: Vec<Word> = deterministic_wp_suite(&ctx, 1).unwrap().collect();
        let expect: Vec<Word> = vec![
            Word::from(vec![0, 0]),
            Word::from(vec![0, 1]),
            Word::from(vec![1, 0]),
            Word::from(vec![1, 1]),
        ];
        assert_eq!(words, expect);
    }

    #[test]
    fn two_state_machine_shares_the_single_discriminator() {
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x", "y"]).unwrap();
        let m = MealyMachine::new(inputs, outputs, 2, 0, vec![(1, 0), (0, 1)]).unwrap();
        let ctx = WpContext::build(&m).unwrap();
        assert_eq!(ctx.e_set(0), &[Word::from(vec![0])]);
        assert_eq!(ctx.e_set(1), &[Word::from(vec![0])]);
    }

    #[test]
    fn non_minimal_hypothesis_is_refused() {
        let inputs = Alphabet::new(["a"]).unwrap();
        let outputs = Alphabet::new(["x"]).unwrap();
        let m = MealyMachine::new(inputs, outputs, 2, 0, vec![(1, 0), (0, 0)]).unwrap();
        assert_eq!(
            WpContext::build(&m).unwrap_err(),
            TestError::IndistinguishableStates(0, 1)
        );
    }

    #[test]
    fn pairwise_sets_agree_with_product_search_and_separate_on_replay() {
        let mut rng = rng_from_seed(21);
        for _ in 0..10 {
            let m = random_minimal_machine(&mut rng, 20, 3, 3);
            let ctx = WpContext::build(&m).unwrap();
            for p in m.states() {
                for q in m.states() {
                    if p >= q {
                        continue;
                    }
                    // some member of E_p distinguishes (p, q) by replay
                    let separated = ctx.e_set(p).iter().any(|w| {
                        m.run_from(p, w).unwrap() != m.run_from(q, w).unwrap()
                    });
                    assert!(separated, "E_{p} fails to separate ({p},{q})");
                    // the backward-BFS word equals the product-BFS word
                    let direct = m.find_discriminator(p, q).unwrap().unwrap();
                    assert!(
                        ctx.e_set(p).contains(&direct) && ctx.e_set(q).contains(&direct),
                        "pair ({p},{q}): expected {direct:?} in both sets"
                    );
                }
            }
        }
    }

    #[test]
    fn counting_matches_by_direct_enumeration() {
        let mut rng = rng_from_seed(33);
        for _ in 0..10 {
            let m = random_minimal_machine(&mut rng, 4, 2, 2);
            let ctx = WpContext::build(&m).unwrap();
            for m_bound in [4u32, 5, 6] {
                let counted = deterministic_wp_suite(&ctx, m_bound).unwrap().count() as u128;
                let l = (m_bound - 4 + 1) as usize;
                assert_eq!(counted, suite_size(&ctx, l));
                // independent formula: sum over u, v of max(1, |E_{δ(uv)}|)
                let mut expect = 0u128;
                for u in ctx.transition_cover() {
                    let infixes = (m.inputs().len() as u128).pow(l as u32);
                    for rank in 0..infixes {
                        let mut v = Vec::new();
                        let mut r = rank;
                        for _ in 0..l {
                            v.push((r % m.inputs().len() as u128) as SymbolId);
                            r /= m.inputs().len() as u128;
                        }
                        v.reverse();
                        let mut word = u.clone();
                        for &s in &v {
                            word.push(s);
                        }
                        let q = m.state_after(0, &word).unwrap();
                        expect += ctx.e_set(q).len().max(1) as u128;
                    }
                }
                assert_eq!(counted, expect);
            }
        }
    }

    #[test]
    fn product_count_example() {
        // n=3, k=2, m=3 (l=1), all |E_q|=2 → |S·I| · k · 2 = 6·2·2 = 24
        let mut rng = rng_from_seed(1);
        let ctx = loop {
            let m = random_minimal_machine(&mut rng, 3, 2, 2);
            let ctx = WpContext::build(&m).unwrap();
            if (0..3).all(|q| ctx.e_set(q).len() == 2) {
                break ctx;
            }
        };
        assert_eq!(deterministic_wp_suite(&ctx, 3).unwrap().count(), 24);
    }

    #[test]
    fn suite_cap_is_enforced() {
        let mut rng = rng_from_seed(8);
        let m = random_minimal_machine(&mut rng, 10, 4, 3);
        let ctx = WpContext::build(&m).unwrap();
        let err = deterministic_wp_suite_with_cap(&ctx, 20, Some(1000)).unwrap_err();
        assert!(matches!(err, TestError::SuiteTooLarge { .. }));
        // forcing works
        assert!(deterministic_wp_suite_with_cap(&ctx, 11, None).is_ok());
    }

    #[test]
    fn suite_never_flags_the_hypothesis_itself() {
        let mut rng = rng_from_seed(13);
        let m = random_minimal_machine(&mut rng, 6, 2, 2);
        let ctx = WpContext::build(&m).unwrap();
        for word in deterministic_wp_suite(&ctx, 7).unwrap() {
            let a = m.run(&word).unwrap();
            let b = m.run(&word).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mutants_with_at_most_m_states_are_detected() {
        use crate::util::RngExt;
        // the m-completeness guarantee at desk scale: random mutants of the
        // hypothesis with ≤ m states that differ in behaviour are caught
        let mut rng = rng_from_seed(55);
        let hyp = random_minimal_machine(&mut rng, 5, 2, 2);
        let ctx = WpContext::build(&hyp).unwrap();
        let mut tested = 0;
        while tested < 50 {
            let mutant = random_minimal_machine(&mut rng, 5, 2, 2);
            // perturb one transition of a copy of the hypothesis as well,
            // alternating with fully random machines
            let mutant = if tested % 2 == 0 {
                mutant
            } else {
                let n = hyp.state_count();
                let k = hyp.inputs().len();
                let mut table = Vec::new();
                for q in 0..n {
                    for a in 0..k as SymbolId {
                        table.push((hyp.successor(q, a), hyp.output(q, a)));
                    }
                }
                let slot = rng.below(table.len());
                table[slot] = (
                    rng.below(n as usize) as StateId,
                    rng.below(hyp.outputs().len()) as SymbolId,
                );
                MealyMachine::new(
                    hyp.inputs().clone(),
                    hyp.outputs().clone(),
                    n,
                    0,
                    table,
                )
                .unwrap()
            };
            if hyp.equivalent(&mutant).unwrap().is_none() {
                continue;
            }
            tested += 1;
            let caught = deterministic_wp_suite(&ctx, 5)
                .unwrap()
                .any(|w| mutant.run(&w).unwrap() != hyp.run(&w).unwrap());
            assert!(caught, "suite missed a non-equivalent mutant");
        }
    }
}

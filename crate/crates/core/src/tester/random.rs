//! The randomized Wp variant: instead of exhausting the deterministic suite,
//! sample test words of the shape prefix · infix · suffix until a
//! counterexample turns up or the budget runs out.

use crate::fsm::{SymbolId, Word};
use crate::runtime::{MembershipOracle, TargetError};
use crate::util::{Budget, ChaCha12Rng, RngExt};

use super::wp::WpContext;
use super::Counterexample;

/// Parameters of the randomized sampler.
#[derive(Debug, Clone)]
pub struct RandomWpParams {
    /// Minimal infix length.
    pub min_infix: usize,
    /// Expected infix length; the geometric tail is parameterized so the
    /// mean comes out exactly here.
    pub expected_infix: usize,
    /// Maximum number of test queries per invocation.
    pub budget: u64,
}

impl Default for RandomWpParams {
    fn default() -> Self {
        // minimal length three, expected length eleven
        RandomWpParams {
            min_infix: 3,
            expected_infix: 11,
            budget: 100_000,
        }
    }
}

/// Counters reported by one tester invocation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TesterStats {
    /// Test words sampled and compared.
    pub tests: u64,
    /// Total symbols across those words.
    pub symbols: u64,
}

/// Extra infix symbols: a geometric draw with stop probability
/// `1 / (expected - min + 1)`, so the expected total length is `expected`
/// and the support starts at zero extra symbols.
fn geometric_extra(rng: &mut ChaCha12Rng, min: usize, expected: usize) -> usize {
    debug_assert!(expected >= min);
    let denom = (expected - min + 1) as u32;
    if denom <= 1 {
        return 0;
    }
    let mut extra = 0;
    while !rng.chance(1, denom) {
        extra += 1;
    }
    extra
}

/// One random test word: a prefix sampled uniformly from the state cover, a
/// geometric-length infix of uniform input symbols, and a suffix sampled
/// uniformly from the discriminator set of the state the hypothesis reaches
/// after prefix · infix (empty when that set is empty). Word length is not
/// capped.
pub fn sample_random_wp(ctx: &WpContext, params: &RandomWpParams, rng: &mut ChaCha12Rng) -> Word {
    assert!(params.expected_infix >= params.min_infix);
    let mut word = rng.pick(ctx.state_cover()).clone();
    let k = ctx.hypothesis().inputs().len();
    let infix_len = params.min_infix + geometric_extra(rng, params.min_infix, params.expected_infix);
    for _ in 0..infix_len {
        word.push(rng.below(k) as SymbolId);
    }
    let q = ctx
        .hypothesis()
        .state_after(0, &word)
        .expect("sampled word is over the hypothesis alphabet");
    let suffixes = ctx.e_set(q);
    if !suffixes.is_empty() {
        word.extend(rng.pick(suffixes));
    }
    word
}

/// Samples and executes test words until the target disagrees with the
/// hypothesis or the budget is exhausted. A returned counterexample is
/// trimmed to the shortest disagreeing prefix. `budget` adds wall/execution
/// caps on top of the per-invocation test cap in `params`.
pub fn run_tester(
    mq: &mut dyn MembershipOracle,
    ctx: &WpContext,
    params: &RandomWpParams,
    rng: &mut ChaCha12Rng,
    budget: &Budget,
) -> Result<(Option<Counterexample>, TesterStats), TargetError> {
    let mut stats = TesterStats::default();
    for _ in 0..params.budget {
        if budget.exhausted(mq.executions()) {
            break;
        }
        let word = sample_random_wp(ctx, params, rng);
        stats.tests += 1;
        stats.symbols += word.len() as u64;
        let predicted = ctx
            .hypothesis()
            .run(&word)
            .expect("sampled word is over the hypothesis alphabet");
        let observed = mq.query(&word)?;
        if let Some(ce) = Counterexample::from_disagreement(&word, &observed, &predicted) {
            return Ok((Some(ce), stats));
        }
    }
    Ok((None, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::{random_minimal_machine, MealyMachine, StateId};
    use crate::runtime::{wrap_fsm, CachedTarget};
    use crate::util::rng_from_seed;

    #[test]
    fn degenerate_geometric_gives_empty_infix() {
        let mut rng = rng_from_seed(1);
        let m = random_minimal_machine(&mut rng, 3, 2, 2);
        let ctx = WpContext::build(&m).unwrap();
        let params = RandomWpParams {
            min_infix: 0,
            expected_infix: 0,
            budget: 10,
        };
        for _ in 0..200 {
            let w = sample_random_wp(&ctx, &params, &mut rng);
            // word = prefix + suffix only; both bounded by cover/discriminator
            // lengths, so re-deriving the split: every sampled word must be
            // cover ++ suffix exactly
            let matches = ctx.state_cover().iter().any(|p| {
                if !p.is_prefix_of(&w) {
                    return false;
                }
                let rest = w.suffix_from(p.len());
                if rest.is_empty() {
                    return true;
                }
                let q = m.state_after(0, p).unwrap();
                ctx.e_set(q).contains(&rest)
            });
            assert!(matches, "unexpected infix in {w:?}");
        }
    }

    #[test]
    fn mean_infix_length_calibrates_to_expected() {
        let mut rng = rng_from_seed(77);
        let mut total = 0usize;
        let mut min_seen = usize::MAX;
        let samples = 100_000;
        for _ in 0..samples {
            let extra = geometric_extra(&mut rng, 3, 11);
            let len = 3 + extra;
            total += len;
            min_seen = min_seen.min(len);
        }
        let mean = total as f64 / samples as f64;
        assert!(mean > 10.8 && mean < 11.2, "mean {mean}");
        assert_eq!(min_seen, 3);
    }

    #[test]
    fn prefixes_are_uniform_over_the_state_cover() {
        let mut rng = rng_from_seed(5);
        let m = random_minimal_machine(&mut rng, 8, 2, 3);
        let ctx = WpContext::build(&m).unwrap();
        let params = RandomWpParams {
            min_infix: 0,
            expected_infix: 0,
            budget: 0,
        };
        // count which cover word each sample starts from; with an empty
        // infix and suffix-reconstruction the longest matching cover prefix
        // is the sampled one except for pathological overlaps, so instead
        // sample with a tagged rng replay: draw the pick index directly
        let mut counts = vec![0u64; ctx.state_cover().len()];
        let n = ctx.state_cover().len();
        let trials = 100_000usize;
        for _ in 0..trials {
            let w = sample_random_wp(&ctx, &params, &mut rng);
            // identify the prefix by replaying all candidates
            let mut matched = None;
            for (i, p) in ctx.state_cover().iter().enumerate() {
                if !p.is_prefix_of(&w) {
                    continue;
                }
                let rest = w.suffix_from(p.len());
                let q = m.state_after(0, p).unwrap();
                if rest.is_empty() || ctx.e_set(q).contains(&rest) {
                    matched = Some(i);
                    break;
                }
            }
            counts[matched.expect("sample must decompose")] += 1;
        }
        let expect = trials as f64 / n as f64;
        let sigma = (expect * (1.0 - 1.0 / n as f64)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            // identification by prefix-matching can only misattribute
            // between cover words that extend each other, which stays well
            // inside this generous 6σ band
            assert!(
                (c as f64 - expect).abs() < 6.0 * sigma,
                "cover word {i} drawn {c} times, expected {expect:.0}±{sigma:.0}"
            );
        }
    }

    #[test]
    fn equivalent_target_passes_after_exactly_budget_tests() {
        let mut rng = rng_from_seed(9);
        let m = random_minimal_machine(&mut rng, 5, 2, 2);
        let ctx = WpContext::build(&m).unwrap();
        let mut mq = CachedTarget::new(wrap_fsm(m.clone()));
        let params = RandomWpParams {
            min_infix: 1,
            expected_infix: 3,
            budget: 500,
        };
        let (verdict, stats) =
            run_tester(&mut mq, &ctx, &params, &mut rng, &Budget::unlimited()).unwrap();
        assert!(verdict.is_none());
        assert_eq!(stats.tests, 500);
    }

    #[test]
    fn planted_output_flip_is_found_and_trimmed() {
        let mut rng = rng_from_seed(31);
        let mut found = 0;
        let trials = 20;
        for _ in 0..trials {
            let m = random_minimal_machine(&mut rng, 10, 2, 2);
            // flip one reachable transition's output
            let n = m.state_count();
            let k = m.inputs().len();
            let mut table = Vec::new();
            for q in 0..n {
                for a in 0..k as u16 {
                    table.push((m.successor(q, a), m.output(q, a)));
                }
            }
            let slot = {
                use crate::util::RngExt;
                rng.below(table.len())
            };
            table[slot].1 ^= 1;
            let target =
                MealyMachine::new(m.inputs().clone(), m.outputs().clone(), n, 0, table).unwrap();
            let ctx = WpContext::build(&m).unwrap();
            let mut mq = CachedTarget::new(wrap_fsm(target.clone()));
            let params = RandomWpParams {
                min_infix: 3,
                expected_infix: 11,
                budget: 100_000,
            };
            let (verdict, _) =
                run_tester(&mut mq, &ctx, &params, &mut rng, &Budget::unlimited()).unwrap();
            if let Some(ce) = verdict {
                // outputs differ at the last symbol only
                let len = ce.word.len();
                assert_ne!(ce.target_outputs.get(len - 1), ce.hypothesis_outputs.get(len - 1));
                assert_eq!(
                    ce.target_outputs.prefix(len - 1),
                    ce.hypothesis_outputs.prefix(len - 1)
                );
                assert_eq!(target.run(&ce.word).unwrap(), ce.target_outputs);
                assert_eq!(m.run(&ce.word).unwrap(), ce.hypothesis_outputs);
                found += 1;
            }
        }
        assert!(found >= 19, "only {found}/{trials} flips found");
    }

    #[test]
    fn sampler_never_leaves_the_alphabet_and_respects_min_length() {
        let mut rng = rng_from_seed(2);
        let m = random_minimal_machine(&mut rng, 6, 3, 2);
        let ctx = WpContext::build(&m).unwrap();
        let params = RandomWpParams::default();
        for _ in 0..1000 {
            let w = sample_random_wp(&ctx, &params, &mut rng);
            assert!(w.iter().all(|s| (s as usize) < 3));
            assert!(w.len() >= params.min_infix);
        }
    }

    #[test]
    fn tester_respects_the_execution_budget() {
        let mut rng = rng_from_seed(14);
        let m = random_minimal_machine(&mut rng, 5, 2, 2);
        let ctx = WpContext::build(&m).unwrap();
        let mut mq = CachedTarget::new(wrap_fsm(m.clone()));
        let params = RandomWpParams {
            min_infix: 1,
            expected_infix: 2,
            budget: 10_000,
        };
        let budget = Budget::with_execs(50);
        let (verdict, stats) = run_tester(&mut mq, &ctx, &params, &mut rng, &budget).unwrap();
        assert!(verdict.is_none());
        assert!(stats.tests < 10_000, "stopped early: {}", stats.tests);
        assert!(mq.executions() <= 51);
        let _ = StateId::from(0u16);
    }
}

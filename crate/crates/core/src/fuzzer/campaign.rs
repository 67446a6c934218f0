//! The fuzzing loop: take a queue of interesting traces, mutate each entry
//! (deterministic stages once, then havoc, then splicing as a last resort),
//! execute candidates with a fresh bitmap, keep whatever covers new
//! behaviour, and collect error-reaching traces as crashes.

use std::collections::{BTreeSet, VecDeque};

use crate::runtime::{ErrorId, Target, TargetError};
use crate::util::{rng_from_seed, Budget, ChaCha12Rng, RngExt};

use super::bitmap::{GlobalCoverage, TraceBitmap};
use super::encode::ByteEncoding;
use super::havoc::{havoc, splice};
use super::mutate::DeterministicMutations;
use super::queue::QueueEntry;
use super::FuzzError;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    /// Havoc candidates generated per queue entry per cycle.
    pub havoc_rounds: u32,
    /// Maximum stacking depth of havoc operations.
    pub havoc_max_stack: u32,
    /// Splice candidates generated per queue entry per cycle.
    pub splice_rounds: u32,
    /// Hard cap on trace growth under havoc and splicing.
    pub max_trace_len: usize,
    /// Emit a stats snapshot every this many executions.
    pub snapshot_interval: Option<u64>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            havoc_rounds: 64,
            havoc_max_stack: 16,
            splice_rounds: 8,
            max_trace_len: 256,
            snapshot_interval: None,
        }
    }
}

/// Campaign counters in the format of the experiment tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzStats {
    /// Completed passes over the whole queue.
    pub cycles: u64,
    /// Total test executions.
    pub execs: u64,
    /// Queue length: traces with a unique execution path.
    pub paths: u64,
    /// Error-reaching traces, raw bytes, in discovery order.
    pub crashes: Vec<(ErrorId, Vec<u8>)>,
}

/// One row of the periodic stats file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzSnapshot {
    pub cycles: u64,
    pub execs: u64,
    pub paths: u64,
    pub crashes: u64,
}

enum Phase {
    /// Begin fuzzing the entry under the cursor.
    Start,
    Det(DeterministicMutations),
    Havoc(u32),
    Splice(u32),
}

/// A single-owner fuzzing campaign over one target. The loop is resumable:
/// `run` stops exactly at the budget and a later call picks up mid-entry.
pub struct FuzzCampaign<T: Target> {
    target: T,
    encoding: ByteEncoding,
    config: FuzzConfig,
    rng: ChaCha12Rng,
    pending_seeds: VecDeque<Vec<u8>>,
    queue: Vec<QueueEntry>,
    global: GlobalCoverage,
    bitmap: TraceBitmap,
    stats: FuzzStats,
    seen_errors: BTreeSet<ErrorId>,
    /// Byte values occurring in queue traces, for havoc's set-byte op.
    byte_pool: Vec<u8>,
    pool_seen: [bool; 256],
    cursor: usize,
    phase: Phase,
    snapshots: Vec<FuzzSnapshot>,
    next_snapshot_at: u64,
}

impl<T: Target> FuzzCampaign<T> {
    pub fn new(
        target: T,
        encoding: ByteEncoding,
        seeds: &[Vec<u8>],
        config: FuzzConfig,
        rng_seed: u64,
    ) -> Result<FuzzCampaign<T>, FuzzError> {
        if seeds.is_empty() {
            return Err(FuzzError::EmptySeedCorpus);
        }
        let next_snapshot_at = config.snapshot_interval.unwrap_or(0);
        Ok(FuzzCampaign {
            target,
            encoding,
            config,
            rng: rng_from_seed(rng_seed),
            pending_seeds: seeds.iter().cloned().collect(),
            queue: Vec::new(),
            global: GlobalCoverage::new(),
            bitmap: TraceBitmap::new(),
            stats: FuzzStats::default(),
            seen_errors: BTreeSet::new(),
            byte_pool: Vec::new(),
            pool_seen: [false; 256],
            cursor: 0,
            phase: Phase::Start,
            snapshots: Vec::new(),
            next_snapshot_at,
        })
    }

    /// The default seed corpus: one single-byte trace per valid input byte,
    /// covering every top-level input branch.
    pub fn default_seeds(encoding: &ByteEncoding) -> Vec<Vec<u8>> {
        encoding.valid_bytes().into_iter().map(|b| vec![b]).collect()
    }

    /// Fuzzes until the budget is exhausted (`max_execs` counts the
    /// campaign's cumulative executions) or nothing is left to fuzz.
    pub fn run(&mut self, budget: &Budget) -> Result<(), TargetError> {
        while !budget.exhausted(self.stats.execs) {
            if let Some(seed) = self.pending_seeds.pop_front() {
                self.execute_candidate(seed)?;
                continue;
            }
            if self.queue.is_empty() {
                break;
            }
            if let Some(candidate) = self.next_candidate() {
                self.execute_candidate(candidate)?;
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> &FuzzStats {
        &self.stats
    }

    pub fn queue(&self) -> &[QueueEntry] {
        &self.queue
    }

    pub fn snapshots(&self) -> &[FuzzSnapshot] {
        &self.snapshots
    }

    pub fn encoding(&self) -> &ByteEncoding {
        &self.encoding
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn target_mut(&mut self) -> &mut T {
        &mut self.target
    }

    /// Distinct error ids among collected crashes.
    pub fn crash_error_ids(&self) -> BTreeSet<ErrorId> {
        self.seen_errors.clone()
    }

    pub fn coverage_points(&self) -> u64 {
        self.global.coverage_points()
    }

    /// Advances the phase machine to the next mutation candidate. Returns
    /// `None` when the current entry is finished (the cursor moves on).
    fn next_candidate(&mut self) -> Option<Vec<u8>> {
        loop {
            match std::mem::replace(&mut self.phase, Phase::Start) {
                Phase::Start => {
                    let entry = &self.queue[self.cursor];
                    self.phase = if entry.det_done {
                        Phase::Havoc(self.config.havoc_rounds)
                    } else {
                        Phase::Det(DeterministicMutations::new(&entry.trace))
                    };
                }
                Phase::Det(mut mutations) => match mutations.next() {
                    Some(candidate) => {
                        self.phase = Phase::Det(mutations);
                        return Some(candidate);
                    }
                    None => {
                        self.queue[self.cursor].det_done = true;
                        self.phase = Phase::Havoc(self.config.havoc_rounds);
                    }
                },
                Phase::Havoc(remaining) => {
                    if remaining == 0 {
                        self.phase = Phase::Splice(self.config.splice_rounds);
                        continue;
                    }
                    self.phase = Phase::Havoc(remaining - 1);
                    let candidate = havoc(
                        &self.queue[self.cursor].trace,
                        &self.byte_pool,
                        self.config.havoc_max_stack,
                        self.config.max_trace_len,
                        &mut self.rng,
                    );
                    return Some(candidate);
                }
                Phase::Splice(remaining) => {
                    if remaining == 0 || self.queue.len() < 2 {
                        self.finish_entry();
                        return None;
                    }
                    self.phase = Phase::Splice(remaining - 1);
                    // partner must cover a different path; a few random
                    // draws are enough in practice
                    let mut partner = None;
                    for _ in 0..8 {
                        let j = self.rng.below(self.queue.len());
                        if j != self.cursor
                            && self.queue[j].signature != self.queue[self.cursor].signature
                        {
                            partner = Some(j);
                            break;
                        }
                    }
                    let Some(j) = partner else {
                        self.finish_entry();
                        return None;
                    };
                    let mut candidate = splice(
                        &self.queue[self.cursor].trace,
                        &self.queue[j].trace,
                        &mut self.rng,
                    );
                    candidate.truncate(self.config.max_trace_len.max(1));
                    return Some(candidate);
                }
            }
        }
    }

    fn finish_entry(&mut self) {
        self.phase = Phase::Start;
        self.cursor += 1;
        if self.cursor >= self.queue.len() {
            self.cursor = 0;
            self.stats.cycles += 1;
        }
    }

    fn execute_candidate(&mut self, raw: Vec<u8>) -> Result<(), TargetError> {
        let word = self.encoding.sanitize(&raw);
        self.bitmap.clear();
        let exec = self.target.execute(&word, Some(&mut self.bitmap))?;
        self.stats.execs += 1;
        let signature = self.bitmap.classify();
        let novel = self.global.is_interesting(&signature);
        if let Some(error) = exec.error {
            // keep the first witness of every error id, plus any crasher
            // with novel coverage
            let first_witness = self.seen_errors.insert(error);
            if first_witness || novel {
                self.stats.crashes.push((error, raw));
            }
        } else if novel {
            for &b in &raw {
                if !self.pool_seen[b as usize] {
                    self.pool_seen[b as usize] = true;
                    self.byte_pool.push(b);
                }
            }
            self.queue.push(QueueEntry {
                trace: raw,
                signature,
                discovered_at: self.stats.execs,
                det_done: false,
            });
            self.stats.paths = self.queue.len() as u64;
        }
        if self
            .config
            .snapshot_interval
            .is_some_and(|_| self.stats.execs >= self.next_snapshot_at)
        {
            self.snapshot();
            self.next_snapshot_at = self.stats.execs + self.config.snapshot_interval.unwrap();
        }
        Ok(())
    }

    fn snapshot(&mut self) {
        self.snapshots.push(FuzzSnapshot {
            cycles: self.stats.cycles,
            execs: self.stats.execs,
            paths: self.stats.paths,
            crashes: self.stats.crashes.len() as u64,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::{ProgramTarget, ReactiveProgram};

    const STAIRCASE: &str = "\
inputs: a b c
outputs: go
var k 0..3 = 0
rule in == a && k == 0 -> k := 1; emit go
rule in == b && k == 1 -> k := 2; emit go
rule in == c && k == 2 -> ; error 5
";

    fn campaign_for(text: &str, seed: u64) -> FuzzCampaign<ProgramTarget> {
        let program = ReactiveProgram::parse(text, 7).unwrap();
        let encoding = ByteEncoding::from_alphabet(program.inputs()).unwrap();
        let seeds = FuzzCampaign::<ProgramTarget>::default_seeds(&encoding);
        FuzzCampaign::new(
            ProgramTarget::new(program),
            encoding,
            &seeds,
            FuzzConfig::default(),
            seed,
        )
        .unwrap()
    }

    #[test]
    fn finds_a_shallow_error() {
        let mut campaign = campaign_for(STAIRCASE, 1);
        campaign.run(&Budget::with_execs(200_000)).unwrap();
        assert!(
            campaign.crash_error_ids().contains(&5),
            "error 5 not found in {} execs, {} paths",
            campaign.stats().execs,
            campaign.stats().paths
        );
    }

    #[test]
    fn empty_seed_corpus_is_refused() {
        let program = ReactiveProgram::parse(STAIRCASE, 7).unwrap();
        let encoding = ByteEncoding::from_alphabet(program.inputs()).unwrap();
        let r = FuzzCampaign::new(
            ProgramTarget::new(program),
            encoding,
            &[],
            FuzzConfig::default(),
            0,
        );
        assert!(matches!(r, Err(FuzzError::EmptySeedCorpus)));
    }

    #[test]
    fn campaigns_are_seed_deterministic() {
        let run = |rng_seed| {
            let mut c = campaign_for(STAIRCASE, rng_seed);
            c.run(&Budget::with_execs(30_000)).unwrap();
            (
                c.stats().clone(),
                c.queue().iter().map(|e| e.trace.clone()).collect::<Vec<_>>(),
            )
        };
        let (s1, q1) = run(42);
        let (s2, q2) = run(42);
        assert_eq!(s1, s2);
        assert_eq!(q1, q2);
        assert_eq!(s1.execs, 30_000);
    }

    #[test]
    fn budget_is_exact_and_resumable() {
        let mut c1 = campaign_for(STAIRCASE, 9);
        c1.run(&Budget::with_execs(10_000)).unwrap();
        assert_eq!(c1.stats().execs, 10_000);
        c1.run(&Budget::with_execs(25_000)).unwrap();
        assert_eq!(c1.stats().execs, 25_000);

        let mut c2 = campaign_for(STAIRCASE, 9);
        c2.run(&Budget::with_execs(25_000)).unwrap();
        assert_eq!(c1.stats(), c2.stats(), "sliced run must equal one-shot run");
    }

    #[test]
    fn paths_equals_queue_length_and_signatures_are_fresh() {
        let mut c = campaign_for(STAIRCASE, 3);
        c.run(&Budget::with_execs(20_000)).unwrap();
        assert_eq!(c.stats().paths as usize, c.queue().len());
        // stored signatures match a re-execution (no stale entries)
        let mut bitmap = TraceBitmap::new();
        for entry in c.queue.iter() {
            let word = c.encoding.sanitize(&entry.trace);
            bitmap.clear();
            let _ = c.target.execute(&word, Some(&mut bitmap)).unwrap();
            assert_eq!(bitmap.classify(), entry.signature);
        }
    }

    #[test]
    fn crashes_reproduce_their_error_id() {
        let mut c = campaign_for(STAIRCASE, 5);
        c.run(&Budget::with_execs(100_000)).unwrap();
        assert!(!c.stats().crashes.is_empty());
        let crashes = c.stats().crashes.clone();
        for (id, raw) in crashes {
            let word = c.encoding.sanitize(&raw);
            let exec = c.target_mut().execute(&word, None).unwrap();
            assert_eq!(exec.error, Some(id));
        }
    }

    #[test]
    fn unreachable_error_is_never_reported() {
        let text = "\
inputs: a b
outputs: go
var k 0..1 = 0
rule in == a -> k := 1; emit go
rule k == 0 && k == 1 -> ; error 9
";
        let mut c = campaign_for(text, 11);
        c.run(&Budget::with_execs(50_000)).unwrap();
        assert!(c.crash_error_ids().is_empty());
    }
}

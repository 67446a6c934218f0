//! Corpus entries.

use super::bitmap::Signature;

/// One interesting test trace: the raw (pre-sanitization) bytes, the coverage
/// signature that made it interesting, and scheduling bookkeeping.
#[derive(Debug, Clone)]
pub struct QueueEntry {
    pub trace: Vec<u8>,
    pub signature: Signature,
    /// Campaign execution counter at discovery time.
    pub discovered_at: u64,
    /// Deterministic stages run exactly once per entry.
    pub det_done: bool,
}

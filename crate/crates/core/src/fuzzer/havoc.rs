//! Randomized stacked mutations (havoc) and last-resort splicing.

use crate::util::{ChaCha12Rng, RngExt};

use super::queue::QueueEntry;
use super::FuzzError;

/// Applies a random stack of 1..=`intensity` operations drawn uniformly
/// from: single-bit flip, setting a previously-discovered byte value,
/// add/subtract of a small integer, insertion of a random byte, block
/// deletion, block duplication by overwrite or insertion, and block zeroing.
///
/// The result is never empty (deletion is capped) and never longer than
/// `max_len`. `intensity` 0 is an identity escape hatch for tests.
pub fn havoc(
    base: &[u8],
    discovered: &[u8],
    intensity: u32,
    max_len: usize,
    rng: &mut ChaCha12Rng,
) -> Vec<u8> {
    let mut buf = base.to_vec();
    if intensity == 0 {
        return buf;
    }
    let stack = rng.below(intensity as usize) + 1;
    for _ in 0..stack {
        debug_assert!(!buf.is_empty());
        match rng.below(8) {
            0 => {
                // single-bit flip
                let bit = rng.below(buf.len() * 8);
                buf[bit / 8] ^= 0x80 >> (bit % 8);
            }
            1 => {
                // set a byte to a previously discovered value
                let pos = rng.below(buf.len());
                buf[pos] = if discovered.is_empty() {
                    rng.byte()
                } else {
                    *rng.pick(discovered)
                };
            }
            2 => {
                // add or subtract a small integer
                let pos = rng.below(buf.len());
                let delta = rng.below(35) as u8 + 1;
                buf[pos] = if rng.chance(1, 2) {
                    buf[pos].wrapping_add(delta)
                } else {
                    buf[pos].wrapping_sub(delta)
                };
            }
            3 => {
                // insert one random byte
                if buf.len() < max_len {
                    let pos = rng.below(buf.len() + 1);
                    buf.insert(pos, rng.byte());
                }
            }
            4 => {
                // delete a block, keeping at least one byte
                if buf.len() > 1 {
                    let len = rng.below(buf.len() - 1) + 1;
                    let start = rng.below(buf.len() - len + 1);
                    buf.drain(start..start + len);
                }
            }
            5 => {
                // duplicate a block by overwrite
                let len = rng.below(buf.len()) + 1;
                let src = rng.below(buf.len() - len + 1);
                let dst = rng.below(buf.len() - len + 1);
                let block = buf[src..src + len].to_vec();
                buf[dst..dst + len].copy_from_slice(&block);
            }
            6 => {
                // duplicate a block by insertion
                let room = max_len.saturating_sub(buf.len());
                if room > 0 {
                    let len = rng.below(buf.len().min(room)) + 1;
                    let src = rng.below(buf.len() - len + 1);
                    let dst = rng.below(buf.len() + 1);
                    let block = buf[src..src + len].to_vec();
                    buf.splice(dst..dst, block);
                }
            }
            _ => {
                // zero a block
                let len = rng.below(buf.len()) + 1;
                let start = rng.below(buf.len() - len + 1);
                buf[start..start + len].fill(0);
            }
        }
    }
    buf
}

/// Crossover of two traces: a random-length prefix of `a` followed by a
/// random suffix of `b`. Cut points are resampled until the result is
/// nonempty.
pub fn splice(a: &[u8], b: &[u8], rng: &mut ChaCha12Rng) -> Vec<u8> {
    assert!(!a.is_empty() && !b.is_empty());
    loop {
        let cut_a = rng.below(a.len() + 1);
        let cut_b = rng.below(b.len() + 1);
        if cut_a + (b.len() - cut_b) == 0 {
            continue;
        }
        let mut out = a[..cut_a].to_vec();
        out.extend_from_slice(&b[cut_b..]);
        return out;
    }
}

/// Splices two queue entries, refusing entries that cover the same path.
pub fn splice_entries(
    a: &QueueEntry,
    b: &QueueEntry,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<u8>, FuzzError> {
    if a.signature == b.signature {
        return Err(FuzzError::IdenticalSignatures);
    }
    Ok(splice(&a.trace, &b.trace, rng))
}

//! Deterministic mutation stages, applied once per queue entry in a fixed
//! order: bit flips (1/2/4 bits), byte flips (1/2/4 bytes), arithmetic
//! increments/decrements on 8/16/32-bit windows, and overwrites with preset
//! boundary integers. Every mutant keeps the input's length; windows that
//! would run past the end are skipped.

/// Preset integers known to trigger edge conditions.
pub(crate) const INTERESTING_8: [i8; 9] = [-128, -1, 0, 1, 16, 32, 64, 100, 127];

pub(crate) const INTERESTING_16: [i16; 19] = [
    -128, -1, 0, 1, 16, 32, 64, 100, 127, // the 8-bit set
    -32768, -129, 128, 255, 256, 512, 1000, 1024, 4096, 32767,
];

pub(crate) const INTERESTING_32: [i32; 27] = [
    -128, -1, 0, 1, 16, 32, 64, 100, 127, // the 8-bit set
    -32768, -129, 128, 255, 256, 512, 1000, 1024, 4096, 32767, // the 16-bit set
    -2147483648, -100663046, -32769, 32768, 65535, 65536, 100663045, 2147483647,
];

/// Largest arithmetic delta tried by the arithmetic stages.
pub(crate) const ARITH_MAX: u64 = 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    BitFlip(usize),  // width in bits: 1, 2, 4
    ByteFlip(usize), // width in bytes: 1, 2, 4
    Arith(usize),    // width in bytes: 1, 2, 4
    Interest(usize), // width in bytes: 1, 2, 4
}

const STAGES: [Stage; 12] = [
    Stage::BitFlip(1),
    Stage::BitFlip(2),
    Stage::BitFlip(4),
    Stage::ByteFlip(1),
    Stage::ByteFlip(2),
    Stage::ByteFlip(4),
    Stage::Arith(1),
    Stage::Arith(2),
    Stage::Arith(4),
    Stage::Interest(1),
    Stage::Interest(2),
    Stage::Interest(4),
];

impl Stage {
    /// Number of window positions for a trace of `len` bytes.
    fn positions(self, len: usize) -> usize {
        match self {
            Stage::BitFlip(w) => (len * 8).saturating_sub(w - 1),
            Stage::ByteFlip(w) | Stage::Arith(w) | Stage::Interest(w) => {
                len.saturating_sub(w - 1)
            }
        }
    }

    /// Number of variants per window position.
    fn variants(self) -> usize {
        match self {
            Stage::BitFlip(_) | Stage::ByteFlip(_) => 1,
            // each delta, plus/minus, and for multi-byte both endiannesses
            Stage::Arith(1) => ARITH_MAX as usize * 2,
            Stage::Arith(_) => ARITH_MAX as usize * 4,
            Stage::Interest(1) => INTERESTING_8.len(),
            Stage::Interest(2) => INTERESTING_16.len() * 2,
            Stage::Interest(_) => INTERESTING_32.len() * 2,
        }
    }
}

/// Lazily enumerates all deterministic mutants of a trace, in stage order.
/// Owns a copy of the base trace, so it can be suspended and resumed freely
/// by the campaign loop.
pub struct DeterministicMutations {
    base: Vec<u8>,
    stage: usize,
    pos: usize,
    variant: usize,
}

impl DeterministicMutations {
    pub fn new(base: &[u8]) -> DeterministicMutations {
        DeterministicMutations {
            base: base.to_vec(),
            stage: 0,
            pos: 0,
            variant: 0,
        }
    }

    fn emit(&self, stage: Stage) -> Vec<u8> {
        let mut buf = self.base.clone();
        let pos = self.pos;
        match stage {
            Stage::BitFlip(w) => {
                for i in 0..w {
                    let bit = pos + i;
                    // MSB-first within each byte
                    buf[bit / 8] ^= 0x80 >> (bit % 8);
                }
            }
            Stage::ByteFlip(w) => {
                for b in &mut buf[pos..pos + w] {
                    *b ^= 0xff;
                }
            }
            Stage::Arith(w) => {
                let delta = (self.variant / if w == 1 { 2 } else { 4 }) as u64 + 1;
                let mode = self.variant % if w == 1 { 2 } else { 4 };
                match (w, mode) {
                    (1, 0) => buf[pos] = buf[pos].wrapping_add(delta as u8),
                    (1, 1) => buf[pos] = buf[pos].wrapping_sub(delta as u8),
                    (2, m) => {
                        let bytes: [u8; 2] = buf[pos..pos + 2].try_into().unwrap();
                        let v = if m < 2 {
                            u16::from_le_bytes(bytes)
                        } else {
                            u16::from_be_bytes(bytes)
                        };
                        let v = if m % 2 == 0 {
                            v.wrapping_add(delta as u16)
                        } else {
                            v.wrapping_sub(delta as u16)
                        };
                        let out = if m < 2 { v.to_le_bytes() } else { v.to_be_bytes() };
                        buf[pos..pos + 2].copy_from_slice(&out);
                    }
                    (4, m) => {
                        let bytes: [u8; 4] = buf[pos..pos + 4].try_into().unwrap();
                        let v = if m < 2 {
                            u32::from_le_bytes(bytes)
                        } else {
                            u32::from_be_bytes(bytes)
                        };
                        let v = if m % 2 == 0 {
                            v.wrapping_add(delta as u32)
                        } else {
                            v.wrapping_sub(delta as u32)
                        };
                        let out = if m < 2 { v.to_le_bytes() } else { v.to_be_bytes() };
                        buf[pos..pos + 4].copy_from_slice(&out);
                    }
                    _ => unreachable!(),
                }
            }
            Stage::Interest(w) => match w {
                1 => buf[pos] = INTERESTING_8[self.variant] as u8,
                2 => {
                    let v = INTERESTING_16[self.variant / 2] as u16;
                    let out = if self.variant % 2 == 0 {
                        v.to_le_bytes()
                    } else {
                        v.to_be_bytes()
                    };
                    buf[pos..pos + 2].copy_from_slice(&out);
                }
                4 => {
                    let v = INTERESTING_32[self.variant / 2] as u32;
                    let out = if self.variant % 2 == 0 {
                        v.to_le_bytes()
                    } else {
                        v.to_be_bytes()
                    };
                    buf[pos..pos + 4].copy_from_slice(&out);
                }
                _ => unreachable!(),
            },
        }
        buf
    }
}

impl Iterator for DeterministicMutations {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        loop {
            let stage = *STAGES.get(self.stage)?;
            let positions = stage.positions(self.base.len());
            if self.pos >= positions {
                self.stage += 1;
                self.pos = 0;
                self.variant = 0;
                continue;
            }
            let mutant = self.emit(stage);
            self.variant += 1;
            if self.variant >= stage.variants() {
                self.variant = 0;
                self.pos += 1;
            }
            return Some(mutant);
        }
    }
}

/// Closed-form number of deterministic mutants for a trace of `len` bytes.
pub fn deterministic_mutation_count(len: usize) -> u64 {
    STAGES
        .iter()
        .map(|s| s.positions(len) as u64 * s.variants() as u64)
        .sum()
}

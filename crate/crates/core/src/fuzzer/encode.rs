//! Byte ↔ input-symbol mapping and trace sanitization.
//!
//! The fuzzer mutates raw bytes; before execution a trace is sanitized by
//! mapping each byte to an input symbol and dropping bytes with no mapping,
//! mirroring how invalid inputs are filtered out of fuzzer-generated tests.

use crate::fsm::{Alphabet, SymbolId, Word};

use super::FuzzError;

/// The campaign's byte encoding of the input alphabet.
#[derive(Debug, Clone)]
pub struct ByteEncoding {
    to_symbol: Box<[Option<SymbolId>; 256]>,
    to_byte: Vec<u8>,
}

impl ByteEncoding {
    /// Derives the encoding from single-byte labels (e.g. digit or letter
    /// inputs): each symbol's byte is its label's only byte. Fails with
    /// [`FuzzError::NoByteEncoding`] when any label is longer.
    pub fn from_alphabet(alphabet: &Alphabet) -> Result<ByteEncoding, FuzzError> {
        let mut pairs = Vec::with_capacity(alphabet.len());
        for id in alphabet.ids() {
            let label = alphabet.label(id);
            if label.len() != 1 {
                return Err(FuzzError::NoByteEncoding);
            }
            pairs.push((label.as_bytes()[0], id));
        }
        Ok(ByteEncoding::from_table(&pairs))
    }

    /// Builds the encoding from an explicit byte↔symbol table. Later entries
    /// for the same byte win; each symbol should appear exactly once.
    pub fn from_table(pairs: &[(u8, SymbolId)]) -> ByteEncoding {
        let mut to_symbol: Box<[Option<SymbolId>; 256]> = Box::new([None; 256]);
        let max_sym = pairs.iter().map(|(_, s)| *s).max().unwrap_or(0);
        let mut to_byte = vec![0u8; max_sym as usize + 1];
        for &(byte, sym) in pairs {
            to_symbol[byte as usize] = Some(sym);
            to_byte[sym as usize] = byte;
        }
        ByteEncoding { to_symbol, to_byte }
    }

    /// Maps bytes to symbols, dropping unmapped bytes. An all-invalid trace
    /// sanitizes to the empty word.
    pub fn sanitize(&self, bytes: &[u8]) -> Word {
        bytes
            .iter()
            .filter_map(|&b| self.to_symbol[b as usize])
            .collect()
    }

    /// Renders a word back into its byte form.
    pub fn encode(&self, word: &Word) -> Vec<u8> {
        word.iter().map(|s| self.to_byte[s as usize]).collect()
    }

    /// All bytes that map to a symbol, in byte order.
    pub fn valid_bytes(&self) -> Vec<u8> {
        (0u16..256)
            .filter(|&b| self.to_symbol[b as usize].is_some())
            .map(|b| b as u8)
            .collect()
    }
}

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense index of a symbol within its alphabet.
pub type SymbolId = u16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("alphabet must contain at least one symbol")]
    Empty,
    #[error("invalid symbol label {0:?}: labels are nonempty and free of whitespace, '/' and '\"'")]
    BadLabel(String),
    #[error("duplicate symbol label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown symbol label {0:?}")]
    UnknownLabel(String),
}

/// A finite set of symbols with dense ids `0..len` and unique labels.
///
/// Both input and output alphabets use this type. Labels double as the wire
/// representation in DOT files, program sources and trace files, so they may
/// not contain whitespace, `/` or `"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    by_label: HashMap<String, SymbolId>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Alphabet, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet {
            labels: Vec::new(),
            by_label: HashMap::new(),
        };
        for label in labels {
            out.push(label.into())?;
        }
        if out.labels.is_empty() {
            return Err(AlphabetError::Empty);
        }
        Ok(out)
    }

    /// Appends a label, assigning it the next dense id.
    pub fn push(&mut self, label: String) -> Result<SymbolId, AlphabetError> {
        if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == '/' || c == '"') {
            return Err(AlphabetError::BadLabel(label));
        }
        if self.by_label.contains_key(&label) {
            return Err(AlphabetError::DuplicateLabel(label));
        }
        let id = self.labels.len() as SymbolId;
        self.by_label.insert(label.clone(), id);
        self.labels.push(label);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: SymbolId) -> &str {
        &self.labels[id as usize]
    }

    pub fn id_of(&self, label: &str) -> Option<SymbolId> {
        self.by_label.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<SymbolId, AlphabetError> {
        self.id_of(label)
            .ok_or_else(|| AlphabetError::UnknownLabel(label.to_string()))
    }

    pub fn contains_id(&self, id: SymbolId) -> bool {
        (id as usize) < self.labels.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + Clone {
        (0..self.labels.len() as SymbolId).into_iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(|s| s.as_str())
    }

    /// Parses a whitespace-separated sequence of labels into a [`Word`].
    pub fn parse_word(&self, text: &str) -> Result<Word, AlphabetError> {
        let mut word = Word::empty();
        for token in text.split_whitespace() {
            word.push(self.require(token)?);
        }
        Ok(word)
    }

    /// Renders a word as whitespace-separated labels.
    pub fn format_word(&self, word: &Word) -> String {
        word.iter()
            .map(|id| self.label(id))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finite sequence of symbol ids over one alphabet (inputs or outputs).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<SymbolId>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn single(symbol: SymbolId) -> Word {
        Word(vec![symbol])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, symbol: SymbolId) {
        self.0.push(symbol);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// The word followed by one extra symbol.
    pub fn with(&self, symbol: SymbolId) -> Word {
        let mut out = self.clone();
        out.push(symbol);
        out
    }

    pub fn get(&self, index: usize) -> SymbolId {
        self.0[index]
    }

    pub fn last(&self) -> Option<SymbolId> {
        self.0.last().copied()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn iter(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[SymbolId] {
        &self.0
    }

    /// True if `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// True if `self` is a suffix of `other`.
    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[other.0.len() - self.0.len()..] == self.0[..]
    }
}

impl From<Vec<SymbolId>> for Word {
    fn from(symbols: Vec<SymbolId>) -> Word {
        Word(symbols)
    }
}

impl From<&[SymbolId]> for Word {
    fn from(symbols: &[SymbolId]) -> Word {
        Word(symbols.to_vec())
    }
}

impl FromIterator<SymbolId> for Word {
    fn from_iter<T: IntoIterator<Item = SymbolId>>(iter: T) -> Word {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_assigns_dense_ids() {
        let a = Alphabet::new(["open", "close", "lock"]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.id_of("open"), Some(0));
        assert_eq!(a.id_of("lock"), Some(2));
        assert_eq!(a.label(1), "close");
        assert_eq!(a.id_of("missing"), None);
    }

    #[test]
    fn alphabet_rejects_bad_labels() {
        assert_eq!(
            Alphabet::new(["a b"]).unwrap_err(),
            AlphabetError::BadLabel("a b".into())
        );
        assert_eq!(
            Alphabet::new(["a", "a"]).unwrap_err(),
            AlphabetError::DuplicateLabel("a".into())
        );
        assert_eq!(
            Alphabet::new(["x/y"]).unwrap_err(),
            AlphabetError::BadLabel("x/y".into())
        );
        assert_eq!(Alphabet::new(Vec::<String>::new()).unwrap_err(), AlphabetError::Empty);
    }

    #[test]
    fn word_roundtrips_through_labels() {
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        let w = a.parse_word("a c c b").unwrap();
        assert_eq!(w, Word::from(vec![0, 2, 2, 1]));
        assert_eq!(a.format_word(&w), "a c c b");
        assert!(a.parse_word("a d").is_err());
    }

    #[test]
    fn word_prefix_and_concat() {
        let u = Word::from(vec![1, 2]);
        let v = Word::from(vec![3]);
        let uv = u.concat(&v);
        assert_eq!(uv, Word::from(vec![1, 2, 3]));
        assert!(u.is_prefix_of(&uv));
        assert!(v.is_suffix_of(&uv));
        assert_eq!(uv.prefix(2), u);
        assert_eq!(uv.suffix_from(2), v);
    }
}

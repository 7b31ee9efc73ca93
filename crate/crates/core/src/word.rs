//! Alphabets and finite words.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A symbol index; symbols of an alphabet of size `m` are `0..m`.
pub type Symbol = u16;

/// A finite alphabet with display names for its symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// The alphabet `{0, …, m-1}` with decimal names.
    pub fn numeric(m: usize) -> Self {
        assert!(m >= 1, "alphabet must be nonempty");
        assert!(m <= Symbol::MAX as usize, "alphabet too large");
        Alphabet {
            names: (0..m).map(|i| i.to_string()).collect(),
        }
    }

    /// An alphabet with declared symbol names, in declaration order.
    ///
    /// Returns `None` if the list is empty or contains duplicates.
    pub fn named<I, S>(names: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > Symbol::MAX as usize {
            return None;
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return None;
        }
        Some(Alphabet { names })
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.names.len()).map(|s| s as Symbol)
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(|i| i as Symbol)
    }

    /// True when every symbol name is a single character, so words can be
    /// written by plain concatenation.
    fn compact(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Renders a word using the symbol names.
    pub fn format_word(&self, w: &Word) -> String {
        if self.compact() {
            w.0.iter().map(|&s| self.name(s)).collect()
        } else {
            w.0.iter()
                .map(|&s| self.name(s))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parses a word written in the format produced by [`Alphabet::format_word`].
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        if text.is_empty() {
            return Some(Word::empty());
        }
        let symbols: Option<Vec<Symbol>> = if self.compact() {
            text.chars()
                .map(|c| self.lookup(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split('.').map(|part| self.lookup(part)).collect()
        };
        symbols.map(Word)
    }
}

/// A finite word over some alphabet. Ordered lexicographically.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// `a·self`.
    pub fn prepend(&self, a: Symbol) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(a);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// `self·other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start.min(self.0.len())..].to_vec())
    }

    /// True if `needle` occurs as a contiguous factor of `self`.
    pub fn contains_factor(&self, needle: &Word) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle.0.as_slice())
    }

    pub fn all_below(&self, m: usize) -> bool {
        self.0.iter().all(|&s| (s as usize) < m)
    }

    /// Every word of length `n` over `{0..m}`, in lexicographic order.
    pub fn all_of_length(m: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..m as Symbol).map(move |a| {
                        let mut v = w.0.clone();
                        v.push(a);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
        } else {
            write!(f, "{:?}", self.0)?;
        }
        write!(f, ")")
    }
}

/// Parses a string of decimal digits (`"0110"`) into a word. Test and
/// fixture helper for alphabets of size at most ten.
pub fn digits(text: &str) -> Word {
    Word(
        text.chars()
            .map(|c| c.to_digit(10).expect("decimal digit") as Symbol)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse_compact() {
        let a = Alphabet::numeric(3);
        let w = digits("0210");
        assert_eq!(a.format_word(&w), "0210");
        assert_eq!(a.parse_word("0210"), Some(w));
        assert_eq!(a.parse_word("3"), None);
    }

    #[test]
    fn format_long_names() {
        let a = Alphabet::named(["ab", "c"]).unwrap();
        let w = Word(vec![0, 1, 0]);
        assert_eq!(a.format_word(&w), "ab.c.ab");
        assert_eq!(a.parse_word("ab.c.ab"), Some(w));
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(Alphabet::named(["a", "a"]).is_none());
        assert!(Alphabet::named(Vec::<String>::new()).is_none());
    }

    #[test]
    fn factor_search() {
        assert!(digits("01101").contains_factor(&digits("11")));
        assert!(!digits("01010").contains_factor(&digits("11")));
        assert!(digits("0").contains_factor(&Word::empty()));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let ws = Word::all_of_length(2, 2);
        assert_eq!(ws, vec![digits("00"), digits("01"), digits("10"), digits("11")]);
        assert_eq!(Word::all_of_length(3, 0), vec![Word::empty()]);
    }
}

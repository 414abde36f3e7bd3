//! Unweighted automata over tuple alphabets.
//!
//! Letters are fixed-arity tuples of symbols. The symbols `#` and `$` are
//! reserved for the left padding of number representations and of relation
//! graphs respectively; the all-`#` and all-`$` tuples are never alphabet
//! members.

mod dfa;
mod nfa;

pub use dfa::Dfa;
pub use nfa::Nfa;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Reserved padding symbol for number representations.
pub const PAD: &str = "#";
/// Reserved padding symbol for relation graphs.
pub const RPAD: &str = "$";

/// A letter: a fixed-length tuple of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    parts: Vec<String>,
}

impl Letter {
    pub fn new(parts: Vec<String>) -> Letter {
        assert!(!parts.is_empty(), "letters must have arity at least 1");
        Letter { parts }
    }

    pub fn from_strs(parts: &[&str]) -> Letter {
        Letter::new(parts.iter().map(|s| s.to_string()).collect())
    }

    pub fn scalar(s: &str) -> Letter {
        Letter::from_strs(&[s])
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    pub fn part(&self, i: usize) -> &str {
        &self.parts[i]
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }

    /// True when every component equals `sym`.
    pub fn is_uniform(&self, sym: &str) -> bool {
        self.parts.iter().all(|p| p == sym)
    }

    /// The sub-letter formed by the given component indices.
    pub fn project(&self, keep: &[usize]) -> Letter {
        Letter::new(keep.iter().map(|&i| self.parts[i].clone()).collect())
    }

    /// Concatenation of the component tuples.
    pub fn concat(&self, other: &Letter) -> Letter {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Letter::new(parts)
    }

    /// The uniform letter `sym^arity`.
    pub fn uniform(sym: &str, arity: usize) -> Letter {
        Letter::new(vec![sym.to_string(); arity])
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.len() == 1 {
            write!(f, "{}", self.parts[0])
        } else {
            write!(f, "({})", self.parts.join(","))
        }
    }
}

#[derive(Debug)]
struct AlphabetInner {
    letters: Vec<Letter>,
    index: HashMap<Letter, usize>,
    arity: usize,
}

/// An explicitly ordered alphabet of tuple letters. The order is part of
/// the alphabet identity: it drives the radix order everywhere downstream.
#[derive(Debug, Clone)]
pub struct Alphabet(Arc<AlphabetInner>);

impl Alphabet {
    pub fn new(letters: Vec<Letter>) -> Result<Alphabet> {
        if letters.is_empty() {
            return Err(Error::AlphabetMismatch("alphabet must be nonempty".into()));
        }
        let arity = letters[0].arity();
        let mut index = HashMap::new();
        for (i, l) in letters.iter().enumerate() {
            if l.arity() != arity {
                return Err(Error::AlphabetMismatch(
                    "letters must share a common arity".into(),
                ));
            }
            if l.is_uniform(PAD) || l.is_uniform(RPAD) {
                return Err(Error::AlphabetMismatch(format!(
                    "the all-padding letter {l} cannot be an alphabet member"
                )));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::AlphabetMismatch(format!("duplicate letter {l}")));
            }
        }
        Ok(Alphabet(Arc::new(AlphabetInner {
            letters,
            index,
            arity,
        })))
    }

    pub fn from_strs(symbols: &[&str]) -> Alphabet {
        Alphabet::new(symbols.iter().map(|s| Letter::scalar(s)).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.0.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.letters.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn letter(&self, id: usize) -> &Letter {
        &self.0.letters[id]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0.letters
    }

    pub fn id_of(&self, l: &Letter) -> Option<usize> {
        self.0.index.get(l).copied()
    }

    pub fn require_id(&self, l: &Letter) -> Result<usize> {
        self.id_of(l).ok_or_else(|| Error::UnknownLetter(l.to_string()))
    }

    /// Translates a word of letters into letter ids.
    pub fn encode(&self, word: &[Letter]) -> Result<Vec<usize>> {
        word.iter().map(|l| self.require_id(l)).collect()
    }

    /// Structural equality: same letters in the same order.
    pub fn same_as(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.letters == other.0.letters
    }

    /// A copy of this alphabet with the letters permuted into the given
    /// order. `order[k]` is the id (in `self`) of the k-th letter of the
    /// reordered alphabet.
    pub fn reorder(&self, order: &[usize]) -> Result<Alphabet> {
        if order.len() != self.len() {
            return Err(Error::AlphabetMismatch(
                "reorder permutation has wrong length".into(),
            ));
        }
        Alphabet::new(order.iter().map(|&i| self.letter(i).clone()).collect())
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
impl Eq for Alphabet {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_all_pad_letter() {
        assert!(Alphabet::new(vec![
            Letter::from_strs(&["#", "#"]),
            Letter::from_strs(&["a", "b"])
        ])
        .is_err());
        // A partially padded letter is fine.
        assert!(Alphabet::new(vec![
            Letter::from_strs(&["#", "a"]),
            Letter::from_strs(&["a", "#"])
        ])
        .is_ok());
    }

    #[test]
    fn encode_unknown_letter() {
        let a = Alphabet::from_strs(&["a", "b"]);
        assert!(a.encode(&[Letter::scalar("c")]).is_err());
        assert_eq!(a.encode(&[Letter::scalar("b")]).unwrap(), vec![1]);
    }
}

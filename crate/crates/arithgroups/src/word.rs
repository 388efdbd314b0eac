//! Reduced words in a free group.
//!
//! Letters are written `a..z`; capitals denote inverses. Internally a
//! letter is a nonzero i8 whose absolute value is the generator index
//! plus one, negative for inverses. Words are kept freely reduced.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid letter {0:?}: expected a-z or A-Z")]
    BadLetter(char),
    #[error("letter {0:?} exceeds rank {1}")]
    RankExceeded(char, usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<i8>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Parse and freely reduce. `rank` bounds the allowed alphabet.
    pub fn parse(s: &str, rank: usize) -> Result<Self, WordError> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            let l = match c {
                'a'..='z' => (c as i8 - b'a' as i8) + 1,
                'A'..='Z' => -((c as i8 - b'A' as i8) + 1),
                _ => return Err(WordError::BadLetter(c)),
            };
            if l.unsigned_abs() as usize > rank {
                return Err(WordError::RankExceeded(c, rank));
            }
            letters.push(l);
        }
        Ok(Self::from_letters(letters))
    }

    /// Build from raw letters, reducing cancellations.
    pub fn from_letters(letters: Vec<i8>) -> Self {
        let mut out: Vec<i8> = Vec::with_capacity(letters.len());
        for l in letters {
            debug_assert!(l != 0);
            if out.last().is_some_and(|&last| last == -l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Self::from_letters(letters)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `self * w * self^-1`
    pub fn conjugate(&self, w: &Self) -> Self {
        self.concat(w).concat(&self.inverse())
    }

    /// Highest generator index used (1-based); 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.0
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            let c = if l > 0 {
                (b'a' + (l - 1) as u8) as char
            } else {
                (b'A' + (-l - 1) as u8) as char
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl TryFrom<String> for Word {
    type Error = WordError;
    fn try_from(s: String) -> Result<Self, WordError> {
        Word::parse(&s, 26)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_reduce_print() {
        let w = Word::parse("abBA", 2).unwrap();
        assert!(w.is_empty());
        let w = Word::parse("aabb", 2).unwrap();
        assert_eq!(w.to_string(), "aabb");
        assert_eq!(w.inverse().to_string(), "BBAA");
    }

    #[test]
    fn conjugate_and_pow() {
        let a = Word::parse("a", 2).unwrap();
        let b2 = Word::parse("bb", 2).unwrap();
        assert_eq!(a.conjugate(&b2).to_string(), "abbA");
        assert_eq!(a.pow(3).to_string(), "aaa");
        assert_eq!(a.pow(-2).to_string(), "AA");
        assert_eq!(a.pow(0), Word::identity());
    }

    #[test]
    fn rank_enforced() {
        assert!(Word::parse("c", 2).is_err());
        assert!(Word::parse("a!", 2).is_err());
    }
}

//! Short constant identifiers packed into a single `u64`.
//!
//! An atom is a string of at most [`MAX_LEN`] characters drawn from a
//! 64-symbol alphabet (space, `_`, `0-9`, `A-Z`, `a-z`). Characters outside
//! the alphabet are replaced by a space before encoding, so `atom("!?")` and
//! `atom("?!")` are the same atom.
//!
//! Each character is written as one base-64 digit, most significant first.
//! Digits run from 1 to 64 (bijective numeration), which keeps the mapping
//! injective even for leading spaces and makes the empty string encode to
//! zero.

use std::fmt;

use thiserror::Error;

/// Maximum number of characters in an atom.
pub const MAX_LEN: usize = 10;

const ALPHABET: &[u8; 64] = b" _0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

/// Largest valid encoding: ten copies of the last symbol.
pub const MAX_VALUE: u64 = {
    let mut v = 0u64;
    let mut i = 0;
    while i < MAX_LEN {
        v = v * 64 + 64;
        i += 1;
    }
    v
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("atom literal has {0} characters, at most {MAX_LEN} allowed")]
    TooLong(usize),
    #[error("value {0:#x} is not a valid atom encoding")]
    InvalidValue(u64),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Atom(u64);

/// Symbol index of a character, if it belongs to the alphabet.
fn symbol_index(c: char) -> Option<u64> {
    match c {
        ' ' => Some(0),
        '_' => Some(1),
        '0'..='9' => Some(2 + (c as u64 - '0' as u64)),
        'A'..='Z' => Some(12 + (c as u64 - 'A' as u64)),
        'a'..='z' => Some(38 + (c as u64 - 'a' as u64)),
        _ => None,
    }
}

/// Replaces every character outside the alphabet with a space.
pub fn normalize(text: &str) -> String {
    text.chars()
        .map(|c| if symbol_index(c).is_some() { c } else { ' ' })
        .collect()
}

impl Atom {
    pub fn new(text: &str) -> Result<Atom, AtomError> {
        let len = text.chars().count();
        if len > MAX_LEN {
            return Err(AtomError::TooLong(len));
        }
        let value = text
            .chars()
            .fold(0u64, |acc, c| acc * 64 + symbol_index(c).unwrap_or(0) + 1);
        Ok(Atom(value))
    }

    pub fn from_value(value: u64) -> Result<Atom, AtomError> {
        if value > MAX_VALUE {
            return Err(AtomError::InvalidValue(value));
        }
        Ok(Atom(value))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    /// Recovers the (normalized) source text.
    pub fn text(self) -> String {
        let mut digits = Vec::with_capacity(MAX_LEN);
        let mut v = self.0;
        while v > 0 {
            let d = (v - 1) % 64;
            digits.push(ALPHABET[d as usize]);
            v = (v - 1) / 64;
        }
        digits.reverse();
        // every byte comes from the ASCII alphabet
        String::from_utf8(digits).expect("atom alphabet is ASCII")
    }
}

/// Encodes `text` as an atom.
///
/// Panics if `text` is longer than [`MAX_LEN`] characters; use [`Atom::new`]
/// to handle the error instead.
pub fn atom(text: &str) -> Atom {
    match Atom::new(text) {
        Ok(a) => a,
        Err(e) => panic!("{e}: {text:?}"),
    }
}

pub fn atom_encode(text: &str) -> Result<Atom, AtomError> {
    Atom::new(text)
}

pub fn atom_decode(value: u64) -> Result<String, AtomError> {
    Atom::from_value(value).map(Atom::text)
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atom({:?})", self.text())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

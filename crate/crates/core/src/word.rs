//! Letters, alphabets and words over an inverse-closed generating set.
//!
//! Generator `i` owns the two letters `2i` (the generator) and `2i + 1`
//! (its formal inverse), so the involution is a bit flip and letter order
//! is `a, a⁻¹, b, b⁻¹, ...`. Shortlex comparisons use that order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u16) << 1 | inverse as u16)
    }

    pub fn from_index(index: usize) -> Self {
        Letter(index as u16)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Moves a letter between a factor alphabet and a product alphabet.
    pub(crate) fn shifted(self, generators: usize) -> Self {
        Letter(self.0 + 2 * generators as u16)
    }

    pub(crate) fn unshifted(self, generators: usize) -> Self {
        Letter(self.0 - 2 * generators as u16)
    }
}

/// Named generators; inverses are implicit.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    pub fn new(names: Vec<char>) -> Result<Self, ParseError> {
        for (i, c) in names.iter().enumerate() {
            if !c.is_ascii_alphabetic() {
                return Err(ParseError::BadGeneratorName(c.to_string()));
            }
            if names[..i].contains(c) {
                return Err(ParseError::DuplicateGenerator(*c));
            }
        }
        if names.len() > 26 {
            return Err(ParseError::TooManyGenerators(names.len()));
        }
        Ok(Alphabet { names })
    }

    /// The first `n` names of `pool`, used by the built-in families.
    pub(crate) fn standard(n: usize, pool: &str) -> Self {
        Alphabet {
            names: pool.chars().take(n).collect(),
        }
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn letter_count(&self) -> usize {
        2 * self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letter_count()).map(Letter::from_index)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.generator() < self.names.len()
    }

    pub fn generator_of(&self, name: char) -> Option<usize> {
        self.names.iter().position(|&c| c == name)
    }

    pub fn letter_name(&self, letter: Letter) -> String {
        let c = self.names[letter.generator()];
        if letter.is_inverse() {
            format!("{c}-")
        } else {
            c.to_string()
        }
    }

    /// Parses `ab-a`, `a^3 b^-2`, `aba-b--` (a run of `k` dashes after a
    /// generator means its inverse repeated `k` times) or `1` for the
    /// empty word. Whitespace is ignored.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() || chars == ['1'] {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let generator = self
                .generator_of(c)
                .ok_or_else(|| ParseError::UnknownGenerator(c, text.to_string()))?;
            i += 1;
            let mut dashes = 0;
            while i < chars.len() && chars[i] == '-' {
                dashes += 1;
                i += 1;
            }
            let mut count: i64 = if dashes == 0 { 1 } else { -(dashes as i64) };
            if i < chars.len() && chars[i] == '^' {
                if dashes > 0 {
                    return Err(ParseError::BadWord(text.to_string()));
                }
                i += 1;
                let start = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let exponent: String = chars[start..i].iter().collect();
                count = exponent
                    .parse::<i64>()
                    .map_err(|_| ParseError::BadWord(text.to_string()))?;
                if count.unsigned_abs() > 1 << 16 {
                    return Err(ParseError::BadWord(text.to_string()));
                }
            }
            let letter = Letter::new(generator, count < 0);
            letters.extend(std::iter::repeat_n(letter, count.unsigned_abs() as usize));
        }
        Ok(Word(letters))
    }

    pub fn display<'a>(&'a self, word: &'a Word) -> WordDisplay<'a> {
        WordDisplay {
            alphabet: self,
            word,
        }
    }
}

/// A finite sequence of letters. Equality is letter-wise, not in the group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    pub fn letter(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn power(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * exponent.unsigned_abs() as usize);
        for _ in 0..exponent.unsigned_abs() {
            letters.extend_from_slice(&base.0);
        }
        Word(letters)
    }

    /// No adjacent `x x⁻¹` pair.
    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// Length first, then letter order.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

pub struct WordDisplay<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for &letter in self.word.letters() {
            f.write_str(&self.alphabet.letter_name(letter))?;
        }
        Ok(())
    }
}

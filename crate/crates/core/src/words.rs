//! Word and pattern representations plus the factor/border primitives
//! everything else builds on.
//!
//! A [`Word`] is a sequence of letter codes over an alphabet `[q]`. A
//! [`Pattern`] is a word in canonical form (letters renamed by first
//! occurrence), which is the right notion of identity for the instance
//! relation: two words have the same instances iff they agree up to a
//! letter bijection.

use crate::{Error, Result};
use std::fmt;

pub type Letter = u8;

/// Symbols accepted by the text I/O layer, code = index in this string.
pub const TEXT_ALPHABET: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// An immutable finite word over letter codes `0..q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
    alphabet_size_hint: Option<u8>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters, alphabet_size_hint: None }
    }

    pub fn with_alphabet(letters: Vec<Letter>, q: u8) -> Result<Self> {
        if let Some(&c) = letters.iter().find(|&&c| c >= q) {
            return Err(Error::LetterOutOfAlphabet { code: c, q });
        }
        Ok(Word { letters, alphabet_size_hint: Some(q) })
    }

    pub fn empty() -> Self {
        Word::new(Vec::new())
    }

    /// Parses a line of symbols over `0-9a-z`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(text.len());
        for ch in text.trim().bytes() {
            match TEXT_ALPHABET.iter().position(|&c| c == ch.to_ascii_lowercase()) {
                Some(code) => letters.push(code as Letter),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "symbol {:?} is not in the alphabet 0-9a-z",
                        ch as char
                    )))
                }
            }
        }
        Ok(Word::new(letters))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn alphabet_size_hint(&self) -> Option<u8> {
        self.alphabet_size_hint
    }

    /// Number of distinct letters occurring in the word.
    pub fn distinct_letters(&self) -> usize {
        let mut seen = [false; 256];
        let mut count = 0;
        for &c in &self.letters {
            if !seen[c as usize] {
                seen[c as usize] = true;
                count += 1;
            }
        }
        count
    }

    /// `W[i,j]`: the letters `i+1` through `j`, so the result has length `j - i`.
    pub fn substring(&self, i: usize, j: usize) -> Result<Word> {
        if i >= j || j > self.len() {
            return Err(Error::IndexOutOfRange { i, j, len: self.len() });
        }
        Ok(Word::new(self.letters[i..j].to_vec()))
    }

    /// `||W|| = |W| - |L(W)|`, the number of letter recurrences.
    pub fn recurrence_count(&self) -> usize {
        self.len() - self.distinct_letters()
    }

    /// Shortest proper nonempty prefix that is also a suffix, or `None` if
    /// the word is bifix-free. When present its length is at most `|W|/2`.
    pub fn shortest_bifix(&self) -> Result<Option<Word>> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let pi = prefix_function(&self.letters);
        let mut b = pi[self.len()];
        if b == 0 {
            return Ok(None);
        }
        while pi[b] != 0 {
            b = pi[b];
        }
        Ok(Some(Word::new(self.letters[..b].to_vec())))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        for &c in &self.letters {
            let ch = TEXT_ALPHABET.get(c as usize).copied().unwrap_or(b'?');
            write!(f, "{}", ch as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// A word in canonical form together with its letter multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    word: Word,
    multiplicities: Vec<u32>,
}

impl Pattern {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `k = |L(V)|`.
    pub fn distinct_letters(&self) -> usize {
        self.multiplicities.len()
    }

    /// Occurrence count `r_k` of each letter, indexed by canonical code.
    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// `||V|| = |V| - k`.
    pub fn recurrence_count(&self) -> usize {
        self.len() - self.distinct_letters()
    }

    /// True iff every letter occurs at least twice; the empty pattern is
    /// vacuously doubled.
    pub fn is_doubled(&self) -> bool {
        self.multiplicities.iter().all(|&r| r >= 2)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(canonical_pattern(&Word::parse(text)?))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        // Canonical patterns read most naturally over a..z.
        for &c in self.word.letters() {
            let ch = if (c as usize) < 26 { b'a' + c } else { b'?' };
            write!(f, "{}", ch as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

/// Renames letters by first occurrence (0, 1, 2, ...). Two words yield the
/// same pattern iff one is a letter bijection of the other.
pub fn canonical_pattern(w: &Word) -> Pattern {
    let mut map: [Option<Letter>; 256] = [None; 256];
    let mut next: Letter = 0;
    let mut letters = Vec::with_capacity(w.len());
    let mut multiplicities: Vec<u32> = Vec::new();
    for &c in w.letters() {
        let code = match map[c as usize] {
            Some(code) => code,
            None => {
                let code = next;
                map[c as usize] = Some(code);
                next += 1;
                multiplicities.push(0);
                code
            }
        };
        multiplicities[code as usize] += 1;
        letters.push(code);
    }
    Pattern { word: Word::new(letters), multiplicities }
}

/// KMP prefix function, 1-indexed: `pi[m]` is the longest proper border of
/// the length-`m` prefix (`pi[0] = 0`).
pub fn prefix_function(s: &[Letter]) -> Vec<usize> {
    let n = s.len();
    let mut pi = vec![0usize; n + 1];
    let mut k = 0;
    for m in 2..=n {
        while k > 0 && s[k] != s[m - 1] {
            k = pi[k];
        }
        if s[k] == s[m - 1] {
            k += 1;
        }
        pi[m] = k;
    }
    pi
}

/// Shortest nonempty border of each prefix (0 = bifix-free), derived from
/// the prefix function in one pass.
pub fn shortest_border_table(pi: &[usize]) -> Vec<usize> {
    let mut s = vec![0usize; pi.len()];
    for m in 1..pi.len() {
        let b = pi[m];
        s[m] = if b == 0 {
            0
        } else if s[b] != 0 {
            s[b]
        } else {
            b
        };
    }
    s
}

/// All words of `[q]^n` in lexicographic order, with an up-front budget
/// guard against runaway enumerations.
pub fn enumerate_words(q: u8, n: usize, budget: u128) -> Result<WordIter> {
    if q == 0 || q > 36 {
        return Err(Error::BadAlphabet(q as u64));
    }
    let count = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > budget {
        return Err(Error::EnumerationBudget { count, budget });
    }
    Ok(WordIter { q, current: vec![0; n], done: false })
}

pub struct WordIter {
    q: u8,
    current: Vec<Letter>,
    done: bool,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let out = Word::new(self.current.clone());
        // Odometer increment.
        let mut i = self.current.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] + 1 < self.q {
                self.current[i] += 1;
                for c in &mut self.current[i + 1..] {
                    *c = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

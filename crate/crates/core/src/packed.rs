//! Bit-packed words for the search hot paths.
//!
//! Words over `q <= 8` with length <= 42 pack into a `u128` at 3 bits per
//! letter, giving O(1) substring extraction and equality. Zimin-instance
//! verdicts are memoized by content, so they stay valid across backtracking.

use crate::words::{Letter, Word};
use std::collections::HashMap;

const BITS: u32 = 3;

/// Maximum length a packed word can hold.
pub const MAX_LEN: usize = (128 / BITS as usize) - 1; // 41

/// A word packed into a u128, letter `i` at bits `[3i, 3i+3)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Packed {
    bits: u128,
    len: u32,
}

impl Packed {
    pub fn empty() -> Self {
        Packed { bits: 0, len: 0 }
    }

    pub fn from_letters(letters: &[Letter]) -> Option<Self> {
        if letters.len() > MAX_LEN {
            return None;
        }
        let mut bits = 0u128;
        for (i, &c) in letters.iter().enumerate() {
            if c >= 8 {
                return None;
            }
            bits |= (c as u128) << (BITS * i as u32);
        }
        Some(Packed { bits, len: letters.len() as u32 })
    }

    pub fn from_word(w: &Word) -> Option<Self> {
        Self::from_letters(w.letters())
    }

    pub fn to_word(self) -> Word {
        Word::new((0..self.len).map(|i| self.letter(i)).collect())
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, i: u32) -> Letter {
        ((self.bits >> (BITS * i)) & 0b111) as Letter
    }

    pub fn append(&self, c: Letter) -> Packed {
        debug_assert!(c < 8 && (self.len as usize) < MAX_LEN);
        Packed {
            bits: self.bits | ((c as u128) << (BITS * self.len)),
            len: self.len + 1,
        }
    }

    pub fn pop(&self) -> Packed {
        debug_assert!(self.len > 0);
        let len = self.len - 1;
        Packed { bits: self.bits & mask(len), len }
    }

    /// Substring `[a, b)`, O(1).
    pub fn sub(&self, a: u32, b: u32) -> Packed {
        debug_assert!(a <= b && b <= self.len);
        let len = b - a;
        Packed { bits: (self.bits >> (BITS * a)) & mask(len), len }
    }

    /// Prefix of length `i` equals suffix of length `i`, O(1).
    pub fn border_eq(&self, i: u32) -> bool {
        self.sub(0, i) == self.sub(self.len - i, self.len)
    }
}

fn mask(len: u32) -> u128 {
    if len == 0 {
        0
    } else {
        !0u128 >> (128 - BITS * len)
    }
}

impl std::fmt::Display for Packed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

/// Content-keyed memo table for Zimin-instance verdicts.
///
/// Keys are (bits, len, n) so entries survive backtracking and can be shared
/// across an entire search.
#[derive(Default)]
pub struct ZiminCache {
    map: HashMap<(u128, u32, u8), bool>,
}

impl ZiminCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// Is `w` an instance of `Z_n`?
    ///
    /// `Z_1`-instances are the nonempty words; for n > 1, `w` must have a
    /// border of length `i` with `2^(n-1) - 1 <= i < ceil(|w|/2)` whose
    /// prefix is a `Z_(n-1)`-instance.
    pub fn is_zimin_instance(&mut self, w: Packed, n: u8) -> bool {
        if n == 0 {
            return w.is_empty();
        }
        if n == 1 {
            return !w.is_empty();
        }
        let min_border = (1u32 << (n - 1)) - 1;
        // Shortest possible Z_n-instance has length 2^n - 1.
        if w.len() < 2 * min_border + 1 {
            return false;
        }
        if let Some(&v) = self.map.get(&(w.bits, w.len, n)) {
            return v;
        }
        let top = w.len().div_ceil(2); // i < ceil(|w|/2)
        let mut verdict = false;
        for i in min_border..top {
            if w.border_eq(i) && self.is_zimin_instance(w.sub(0, i), n - 1) {
                verdict = true;
                break;
            }
        }
        self.map.insert((w.bits, w.len, n), verdict);
        verdict
    }

    /// Does any suffix of `w` form a `Z_n`-instance? This is the incremental
    /// encounter check used when a search appends one letter: factors not
    /// ending at the last position were vetted earlier.
    pub fn suffix_instance(&mut self, w: Packed, n: u8) -> bool {
        let min_len = (1u32 << n) - 1;
        if w.len() < min_len {
            return false;
        }
        for a in (0..=(w.len() - min_len)).rev() {
            if self.is_zimin_instance(w.sub(a, w.len()), n) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn p(s: &str) -> Packed {
        Packed::from_word(&Word::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn pack_round_trip() {
        for s in ["0", "0110", "012345", "77777"] {
            assert_eq!(p(s).to_word(), Word::parse(s).unwrap());
        }
        assert_eq!(p("0110").sub(1, 3), p("11"));
        assert_eq!(p("0110").append(1), p("01101"));
        assert!(p("0110").border_eq(1));
        assert!(!p("0110").border_eq(2));
    }

    #[test]
    fn zimin_instances_small() {
        let mut cache = ZiminCache::new();
        // Every nonempty word is a Z_1-instance.
        assert!(cache.is_zimin_instance(p("5"), 1));
        assert!(!cache.is_zimin_instance(Packed::empty(), 1));
        // Z_2-instances are words with a border shorter than half.
        assert!(cache.is_zimin_instance(p("010"), 2));
        assert!(cache.is_zimin_instance(p("0110"), 2));
        assert!(!cache.is_zimin_instance(p("0101"), 2));
        assert!(!cache.is_zimin_instance(p("0011"), 2));
        // The same bit repeated 15 = |Z_4| times is a Z_4-instance.
        assert!(cache.is_zimin_instance(p("111111111111111"), 4));
        assert!(!cache.is_zimin_instance(p("11111111111111"), 4));
    }

    #[test]
    fn suffix_instance_detects_new_encounters() {
        let mut cache = ZiminCache::new();
        // 0011 avoids Z_2 entirely; appending 0 makes suffix 110 avoid too,
        // but suffix 0110 is an instance.
        assert!(!cache.suffix_instance(p("0011"), 2));
        assert!(cache.suffix_instance(p("00110"), 2));
    }
}

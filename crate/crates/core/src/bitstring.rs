//! Packed immutable binary sequences.
//!
//! Bits are stored LSB-first in 64-bit words so that equality, slicing, and
//! window comparison run at machine-word granularity; experiment sizes go up
//! to 2^22 bits. A [`BitString`] is immutable after construction and can be
//! shared freely across threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Immutable packed sequence of binary symbols.
///
/// Value equality is defined by `(len, symbol sequence)`; how the string was
/// built is irrelevant. The bits of the final partially-used word beyond
/// `len` are kept zero so derived `PartialEq`/`Hash` are value-correct.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    /// All-zero string of the given length.
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; word_count(len)],
            len,
        }
    }

    /// Build from a predicate over positions.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                s.words[i >> 6] |= 1u64 << (i & 63);
            }
        }
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Uniform Bernoulli(1/2) string drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..word_count(len)).map(|_| rng.random()).collect();
        mask_tail(&mut words, len);
        BitString { words, len }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at position `i` (panics if out of range).
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// Up to 64 bits starting at `pos`, LSB-first. `pos + count` must be in
    /// range and `count <= 64`.
    #[inline]
    pub(crate) fn read_bits(&self, pos: usize, count: usize) -> u64 {
        debug_assert!(count <= 64 && pos + count <= self.len);
        if count == 0 {
            return 0;
        }
        let w = pos >> 6;
        let off = pos & 63;
        let mut v = self.words[w] >> off;
        if off != 0 && w + 1 < self.words.len() {
            v |= self.words[w + 1] << (64 - off);
        }
        if count < 64 {
            v &= (1u64 << count) - 1;
        }
        v
    }

    /// Like [`read_bits`](Self::read_bits) but wrapping around the end of the
    /// string. Requires `count <= len`.
    #[inline]
    fn read_bits_cyclic(&self, pos: usize, count: usize) -> u64 {
        debug_assert!(count <= 64 && count <= self.len);
        let pos = pos % self.len;
        if pos + count <= self.len {
            return self.read_bits(pos, count);
        }
        let head = self.len - pos;
        self.read_bits(pos, head) | (self.read_bits(0, count - head) << head)
    }

    /// Contiguous substring `[start, start + len)`.
    pub fn substring(&self, start: usize, len: usize) -> BitString {
        assert!(
            start + len <= self.len,
            "substring [{start}, {}) out of range (len {})",
            start + len,
            self.len
        );
        let mut words = Vec::with_capacity(word_count(len));
        let mut copied = 0;
        while copied < len {
            let chunk = (len - copied).min(64);
            words.push(self.read_bits(start + copied, chunk));
            copied += chunk;
        }
        BitString { words, len }
    }

    /// Window `[start, start + len)` of the string extended by infinitely many
    /// zeros to the right; `start` may lie past the end.
    pub fn window_zero_padded(&self, start: usize, len: usize) -> BitString {
        if start >= self.len {
            return BitString::zeros(len);
        }
        let avail = (self.len - start).min(len);
        let mut s = self.substring(start, avail);
        s.words.resize(word_count(len), 0);
        s.len = len;
        s
    }

    /// All start positions at which `needle` occurs, ascending.
    ///
    /// Linear mode returns positions in `[0, len - needle.len]`; a needle
    /// longer than the haystack yields no occurrences. Cyclic mode matches
    /// wraparound windows and returns positions in `[0, len)`.
    pub fn find_occurrences(&self, needle: &BitString, cyclic: bool) -> Vec<usize> {
        assert!(!needle.is_empty(), "needle must have at least one symbol");
        let k = needle.len;
        if k > self.len {
            return Vec::new();
        }
        let upper = if cyclic { self.len } else { self.len - k + 1 };
        (0..upper)
            .filter(|&pos| self.matches_at(needle, pos, cyclic))
            .collect()
    }

    /// Does `needle` occur as a linear window starting at `pos`?
    #[inline]
    pub(crate) fn matches_window(&self, needle: &BitString, pos: usize) -> bool {
        pos + needle.len() <= self.len && self.matches_at(needle, pos, false)
    }

    #[inline]
    fn matches_at(&self, needle: &BitString, pos: usize, cyclic: bool) -> bool {
        let k = needle.len;
        let mut done = 0;
        while done < k {
            let chunk = (k - done).min(64);
            let hay = if cyclic {
                self.read_bits_cyclic(pos + done, chunk)
            } else {
                self.read_bits(pos + done, chunk)
            };
            if hay != needle.read_bits(done, chunk) {
                return false;
            }
            done += chunk;
        }
        true
    }

    /// Symbols at positions `start_residue, start_residue + step, ...`.
    ///
    /// This is the de-interleaving access pattern: residue `j` of a codeword
    /// built with period `m` recovers the `j`th interleaved track.
    pub fn stride_subsequence(&self, start_residue: usize, step: usize) -> BitString {
        assert!(step >= 1 && start_residue < step, "require 0 <= residue < step");
        if start_residue >= self.len {
            return BitString::default();
        }
        let len = (self.len - start_residue - 1) / step + 1;
        BitString::from_fn(len, |i| self.get(start_residue + i * step))
    }

    /// Inverse of [`stride_subsequence`](Self::stride_subsequence): rebuilds a
    /// string whose residue-`j` track (period `parts.len()`) is `parts[j]`.
    /// Part lengths must be consistent with a single total length.
    pub fn interleave(parts: &[BitString]) -> BitString {
        let m = parts.len();
        assert!(m >= 1, "interleave needs at least one part");
        let total: usize = parts.iter().map(|p| p.len).sum();
        for (j, p) in parts.iter().enumerate() {
            let expected = if j < total % m { total / m + 1 } else { total / m };
            assert_eq!(
                p.len, expected,
                "part {j} has length {} but the interleaving needs {expected}",
                p.len
            );
        }
        BitString::from_fn(total, |i| parts[i % m].get(i / m))
    }
}

fn mask_tail(words: &mut [u64], len: usize) {
    if !len.is_multiple_of(64) {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << (len % 64)) - 1;
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len {}, {}...)", self.len, self.substring(0, 64))
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.words[i >> 6] |= 1u64 << (i & 63),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid symbol {other:?} at position {i}; expected '0' or '1'"
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn find_linear() {
        assert_eq!(bs("0011").find_occurrences(&bs("01"), false), vec![1]);
        assert_eq!(bs("0000").find_occurrences(&bs("00"), false), vec![0, 1, 2]);
        assert_eq!(bs("01").find_occurrences(&bs("011"), false), Vec::<usize>::new());
    }

    #[test]
    fn find_cyclic() {
        // wrap window 3 -> 0 reads "10"
        assert_eq!(bs("0011").find_occurrences(&bs("10"), true), vec![3]);
        assert_eq!(bs("0011").find_occurrences(&bs("00"), true), vec![0]);
        assert_eq!(bs("0011").find_occurrences(&bs("110"), true), vec![2]);
    }

    #[test]
    fn stride_examples() {
        assert_eq!(bs("010011").stride_subsequence(0, 2), bs("001"));
        assert_eq!(bs("010011").stride_subsequence(1, 2), bs("101"));
        assert_eq!(bs("0101").stride_subsequence(0, 1), bs("0101"));
        assert_eq!(bs("01").stride_subsequence(1, 4), bs("1"));
    }

    #[test]
    fn interleave_round_trip() {
        let s = bs("0100110101101");
        for m in 1..=5 {
            let parts: Vec<_> = (0..m).map(|r| s.stride_subsequence(r, m)).collect();
            assert_eq!(BitString::interleave(&parts), s, "m={m}");
        }
    }

    #[test]
    fn substring_and_read_across_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = BitString::random(300, &mut rng);
        let sub = s.substring(61, 130);
        for i in 0..130 {
            assert_eq!(sub.get(i), s.get(61 + i));
        }
        // bits 60..124 = s[60] followed by sub[0..63]
        assert_eq!(s.read_bits(60, 64), (s.get(60) as u64) | (sub.read_bits(0, 63) << 1));
    }

    #[test]
    fn zero_padded_window() {
        let s = bs("1011");
        assert_eq!(s.window_zero_padded(2, 5), bs("11000"));
        assert_eq!(s.window_zero_padded(7, 3), bs("000"));
    }

    #[test]
    fn display_parse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = BitString::random(99, &mut rng);
        assert_eq!(s.to_string().parse::<BitString>().unwrap(), s);
        assert!("01x1".parse::<BitString>().is_err());
    }

    #[test]
    fn equality_is_value_semantics() {
        let a = BitString::from_fn(70, |i| i % 3 == 0);
        let b = bs(&a.to_string());
        assert_eq!(a, b);
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let mut ha = DefaultHasher::new();
        let mut hb = DefaultHasher::new();
        a.hash(&mut ha);
        b.hash(&mut hb);
        assert_eq!(ha.finish(), hb.finish());
    }
}

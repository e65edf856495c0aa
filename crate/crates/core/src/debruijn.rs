//! Binary de Bruijn sequences.
//!
//! A de Bruijn sequence of order `k` is a cyclic binary string of length 2^k
//! in which every length-`k` string occurs exactly once as a window. The
//! canonical (lexicographically least) sequence is generated by
//! concatenating, in lexicographic order, the Lyndon words whose length
//! divides `k`, so encoder and decoder agree on the pilot without exchanging
//! it.

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Largest supported order; pilots up to 16M symbols.
pub const MAX_ORDER: u32 = 24;

/// A verified binary de Bruijn sequence of order `k` (length 2^k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeBruijnSeq {
    order: u32,
    seq: BitString,
}

/// Outcome of searching a pilot for a sample window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locate {
    /// The unique linear start position of the sample.
    Unique(usize),
    /// The sample does not occur in the pilot.
    NotFound,
    /// Several matches; only possible for samples shorter than the order.
    Ambiguous,
}

/// Lexicographically least binary de Bruijn sequence of order `k`.
pub fn generate(k: u32) -> Result<DeBruijnSeq> {
    if !(1..=MAX_ORDER).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "de Bruijn order must be in 1..={MAX_ORDER}, got {k}"
        )));
    }
    let k = k as usize;
    let mut word = vec![0u8; k + 1];
    let mut out: Vec<bool> = Vec::with_capacity(1 << k);
    // Fredricksen–Kessler–Maiorana: emit Lyndon words of length dividing k
    // in lexicographic order.
    fn extend(t: usize, p: usize, k: usize, word: &mut [u8], out: &mut Vec<bool>) {
        if t > k {
            if k.is_multiple_of(p) {
                out.extend(word[1..=p].iter().map(|&b| b == 1));
            }
        } else {
            word[t] = word[t - p];
            extend(t + 1, p, k, word, out);
            while word[t] < 1 {
                word[t] += 1;
                extend(t + 1, t, k, word, out);
            }
        }
    }
    extend(1, 1, k, &mut word, &mut out);
    debug_assert_eq!(out.len(), 1 << k);
    Ok(DeBruijnSeq {
        order: k as u32,
        seq: BitString::from_bools(&out),
    })
}

/// Independent checker: true iff `s` has length 2^k and all 2^k cyclic
/// k-windows are distinct.
pub fn verify(s: &BitString, k: u32) -> bool {
    if !(1..=MAX_ORDER).contains(&k) || s.len() != 1usize << k {
        return false;
    }
    let n = s.len();
    let mut seen = vec![0u64; n.div_ceil(64)];
    // Maintain the window value incrementally: shift out the low bit, shift
    // in the symbol k positions ahead (wrapping).
    let mut window: u64 = (0..k as usize).fold(0, |w, i| w | ((s.get(i) as u64) << i));
    for pos in 0..n {
        let idx = window as usize;
        if seen[idx >> 6] >> (idx & 63) & 1 == 1 {
            return false;
        }
        seen[idx >> 6] |= 1u64 << (idx & 63);
        let incoming = s.get((pos + k as usize) % n) as u64;
        window = (window >> 1) | (incoming << (k - 1));
    }
    true
}

impl DeBruijnSeq {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn seq(&self) -> &BitString {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rebuild from a serialized pilot string, re-verifying the de Bruijn
    /// property.
    pub fn from_bitstring(seq: BitString, k: u32) -> Result<Self> {
        if !verify(&seq, k) {
            return Err(Error::Parse(format!(
                "sequence of length {} is not a de Bruijn sequence of order {k}",
                seq.len()
            )));
        }
        Ok(DeBruijnSeq { order: k, seq })
    }

    /// Find the unique linear window of the pilot equal to `sample`.
    ///
    /// Samples of length at least the order match at most once, because the
    /// linear k-windows are a subset of the cyclic ones; two matches for such
    /// a sample therefore signal a corrupted pilot and return an error.
    /// Matching is deliberately non-wrapping: the pilot is laid out linearly
    /// in a codeword, so a seam match would be spurious.
    pub fn locate_unique(&self, sample: &BitString) -> Result<Locate> {
        let hits = self.seq.find_occurrences(sample, false);
        match hits.len() {
            0 => Ok(Locate::NotFound),
            1 => Ok(Locate::Unique(hits[0])),
            _ if sample.len() >= self.order as usize => Err(Error::PilotCorrupted),
            _ => Ok(Locate::Ambiguous),
        }
    }
}

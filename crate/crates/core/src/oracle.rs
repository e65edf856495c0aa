//! Exhaustive tiling decoder.
//!
//! A codeword is accepted when every retained fragment embeds into it as a
//! pairwise-disjoint substring (duplicate fragments need disjoint
//! occurrences; gaps left by discarded fragments are unconstrained). The
//! search is exponential by nature — this module validates the achievability
//! argument at desk scale (n <= 128, codebooks up to a few thousand words),
//! it is not a practical decoder.

use crate::bitstring::BitString;
use crate::channel::FragmentSet;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Largest codeword length the interval bitmask supports.
pub const MAX_TILING_N: usize = 128;

/// A list of equal-length codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    codewords: Vec<BitString>,
}

impl Codebook {
    pub fn new(codewords: Vec<BitString>) -> Result<Self> {
        let n = match codewords.first() {
            Some(first) => first.len(),
            None => return Err(Error::InvalidParameter("codebook must be non-empty".into())),
        };
        if codewords.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter("codewords must share one length".into()));
        }
        Ok(Codebook { codewords })
    }

    /// `size` i.i.d. Bernoulli(1/2) codewords of length n.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("codebook size must be >= 1".into()));
        }
        Ok(Codebook {
            codewords: (0..size).map(|_| BitString::random(n, rng)).collect(),
        })
    }

    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn n(&self) -> usize {
        self.codewords[0].len()
    }

    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    /// `log2(size) / n`.
    pub fn rate(&self) -> f64 {
        (self.codewords.len() as f64).log2() / self.n() as f64
    }

    /// One codeword per line.
    pub fn write(&self, w: &mut impl std::io::Write) -> Result<()> {
        for c in &self.codewords {
            writeln!(w, "{c}")?;
        }
        Ok(())
    }

    pub fn read(r: impl std::io::BufRead) -> Result<Self> {
        let mut codewords = Vec::new();
        for line in r.lines() {
            let line = line?;
            if !line.is_empty() {
                codewords.push(line.parse()?);
            }
        }
        Codebook::new(codewords)
    }
}

fn interval_mask(start: usize, len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        ((1u128 << len) - 1) << start
    }
}

/// True iff all fragments embed into `codeword` at pairwise-disjoint
/// intervals (multiset semantics). Requires `codeword.len() <= 128`.
///
/// Fragments are placed longest-first; candidate positions come from exact
/// substring search and the search backtracks over disjoint selections,
/// memoizing failed (fragment, occupancy) states.
pub fn tiles(codeword: &BitString, fragments: &[BitString]) -> bool {
    assert!(
        codeword.len() <= MAX_TILING_N,
        "tiling supports n <= {MAX_TILING_N}, got {}",
        codeword.len()
    );
    if fragments.is_empty() {
        return true;
    }
    if fragments.iter().map(|f| f.len()).sum::<usize>() > codeword.len() {
        return false;
    }
    let mut order: Vec<&BitString> = fragments.iter().collect();
    order.sort_by_key(|f| std::cmp::Reverse(f.len()));
    let placements: Vec<Vec<u128>> = order
        .iter()
        .map(|f| {
            codeword
                .find_occurrences(f, false)
                .into_iter()
                .map(|pos| interval_mask(pos, f.len()))
                .collect()
        })
        .collect();
    if placements.iter().any(|p| p.is_empty()) {
        return false;
    }

    fn go(
        idx: usize,
        occupied: u128,
        placements: &[Vec<u128>],
        memo: &mut HashMap<(usize, u128), bool>,
    ) -> bool {
        if idx == placements.len() {
            return true;
        }
        if let Some(&known) = memo.get(&(idx, occupied)) {
            return known;
        }
        let ok = placements[idx]
            .iter()
            .any(|&mask| mask & occupied == 0 && go(idx + 1, occupied | mask, placements, memo));
        memo.insert((idx, occupied), ok);
        ok
    }
    go(0, 0, &placements, &mut HashMap::new())
}

/// Result of scanning a codebook for tilings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TilingOutcome {
    /// Exactly one codeword tiles the retained fragments.
    Decoded(usize),
    /// More than one codeword tiles them: error is declared.
    Ambiguous,
    /// No codeword tiles them. Impossible when the true codeword is in the
    /// book (its own fragments always tile it); signals harness misuse.
    NoMatch,
}

/// Discard fragments shorter than `gamma * log2(n)` and find the codewords
/// that tile the rest.
pub fn tiling_decode(cb: &Codebook, fs: &FragmentSet, gamma: f64) -> Result<TilingOutcome> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
    }
    let n = cb.n();
    if n > MAX_TILING_N {
        return Err(Error::InvalidParameter(format!(
            "tiling decoder supports n <= {MAX_TILING_N}, got {n}"
        )));
    }
    let threshold = gamma * (n as f64).log2();
    let retained: Vec<BitString> = fs
        .fragments()
        .iter()
        .filter(|f| f.len() as f64 >= threshold)
        .cloned()
        .collect();
    let mut first = None;
    for (i, codeword) in cb.codewords().iter().enumerate() {
        if tiles(codeword, &retained) {
            if first.is_some() {
                return Ok(TilingOutcome::Ambiguous);
            }
            first = Some(i);
        }
    }
    Ok(match first {
        Some(i) => TilingOutcome::Decoded(i),
        None => TilingOutcome::NoMatch,
    })
}

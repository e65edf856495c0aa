//! The interleaved-pilot code.
//!
//! A codeword of length `n = m * 2^k_p` interleaves a de Bruijn pilot of
//! order `k_p` at every m-th position with `m - 1` message blocks drawn from
//! a seeded catalog. Message blocks are filtered so that no length-`k_f`
//! window is shared with the pilot; a fragment long enough to contain `k_f`
//! pilot symbols therefore aligns to the pilot skeleton in exactly one way,
//! and wrong-phase matches are impossible rather than merely unlikely (a
//! wrong-phase stride of a codeword is a contiguous window of some message
//! block, which the filter excludes from the pilot).
//!
//! Fragments shorter than `N_min = m * k_f` are discarded; their positions
//! surface as erasures in the decode report.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::channel::FragmentSet;
use crate::debruijn::{self, DeBruijnSeq, Locate};
use crate::error::{Error, Result};

/// Construction aborts if fewer than this fraction of candidate blocks pass
/// the forbidden-substring filter over a window of `10 * M` draws.
const MIN_ACCEPT_RATE: f64 = 0.01;

/// Full description of one pilot-interleaved code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: usize,
    m: usize,
    delta: f64,
    k_f: usize,
    pilot: DeBruijnSeq,
    index: PilotIndex,
    catalog: Vec<BitString>,
    seed: u64,
    rejections: usize,
}

/// Constant-time pilot lookup. A de Bruijn sequence of order k contains
/// every k-bit value exactly once as a cyclic window, so a sample's k-bit
/// prefix determines its only possible linear position; one direct-indexed
/// table replaces the linear scan during decoding.
#[derive(Debug, Clone, PartialEq)]
struct PilotIndex {
    order: usize,
    /// Indexed by window value; `u32::MAX` marks the windows that only occur
    /// across the cyclic seam and are therefore not linear positions.
    table: Vec<u32>,
}

impl PilotIndex {
    fn build(pilot: &DeBruijnSeq) -> Self {
        let order = pilot.order() as usize;
        let seq = pilot.seq();
        let mut table = vec![u32::MAX; 1 << order];
        for pos in 0..=seq.len() - order {
            table[seq.read_bits(pos, order) as usize] = pos as u32;
        }
        PilotIndex { order, table }
    }

    /// Equivalent to `pilot.locate_unique(sample)` for samples of at least
    /// the pilot order.
    fn locate(&self, pilot: &DeBruijnSeq, sample: &BitString) -> Option<usize> {
        debug_assert!(sample.len() >= self.order);
        let key = sample.read_bits(0, self.order) as usize;
        let pos = self.table[key];
        if pos == u32::MAX {
            return None;
        }
        let pos = pos as usize;
        pilot.seq().matches_window(sample, pos).then_some(pos)
    }
}

/// Where a fragment sits on the codeword skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    /// Global start position of the fragment in the codeword.
    pub start: usize,
    /// Pilot symbols occupy local indices congruent to this residue mod m.
    pub residue: usize,
    /// Number of pilot symbols the match certified.
    pub pilot_hits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignOutcome {
    Aligned(Alignment),
    /// Fragment shorter than `N_min`; unusable by design.
    TooShort,
    /// No certified position (`ambiguous` when several candidates matched).
    Unalignable { ambiguous: bool },
}

/// Outcome of catalog-index recovery for one message slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockOutcome {
    /// Exactly one catalog block agrees with every known symbol.
    Recovered(usize),
    /// Two or more blocks agree; not enough symbols survived.
    Erased,
    /// No block agrees. Impossible without a misalignment; kept as a tripwire.
    Inconsistent,
}

/// Per-position recovery outcome plus the counters that must stay at zero
/// when the soundness argument holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub n: usize,
    pub m: usize,
    /// One char per codeword position: '0', '1', or '?' for an erasure.
    pub symbols: String,
    /// Fraction of the `(m-1) * n / m` message positions recovered.
    pub coverage_recovered: f64,
    pub blocks: Vec<BlockOutcome>,
    /// Usable-length fragments that certified no position.
    pub misalignments: usize,
    /// Usable-length fragments that certified several positions.
    pub ambiguities: usize,
    /// Overlapping writes that disagreed (both contributions voided).
    pub conflicts: usize,
    pub too_short: usize,
    pub aligned_fragments: usize,
    pub aligned_length: usize,
}

impl DecodeReport {
    pub fn symbol(&self, i: usize) -> Option<bool> {
        match self.symbols.as_bytes()[i] {
            b'0' => Some(false),
            b'1' => Some(true),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CodeFile {
    n: usize,
    m: usize,
    delta: f64,
    #[serde(rename = "M")]
    catalog_size: usize,
    seed: u64,
    pilot: String,
}

fn forbidden_len(n: usize, delta: f64) -> usize {
    ((2.0 + delta) * (n as f64).log2()).ceil() as usize
}

/// True iff some length-`k_f` window of `block` occurs as a linear window of
/// the pilot. Vacuously false when the block is shorter than `k_f`.
pub fn contains_forbidden(block: &BitString, pilot: &DeBruijnSeq, k_f: usize) -> bool {
    ForbiddenIndex::build(pilot, k_f).hits(block)
}

/// Pre-extracted pilot windows for repeated forbidden-substring tests.
enum ForbiddenIndex {
    /// k_f fits one machine word: exact window values in a set.
    Packed { k_f: usize, windows: HashSet<u64> },
    /// Wide windows: fall back to direct search.
    Wide { k_f: usize, pilot: BitString },
}

impl ForbiddenIndex {
    fn build(pilot: &DeBruijnSeq, k_f: usize) -> Self {
        let seq = pilot.seq();
        if (1..=64).contains(&k_f) && k_f <= seq.len() {
            let windows = (0..=seq.len() - k_f)
                .map(|pos| seq.read_bits(pos, k_f))
                .collect();
            ForbiddenIndex::Packed { k_f, windows }
        } else {
            ForbiddenIndex::Wide { k_f, pilot: seq.clone() }
        }
    }

    fn hits(&self, block: &BitString) -> bool {
        match self {
            ForbiddenIndex::Packed { k_f, windows } => {
                if *k_f > block.len() {
                    return false;
                }
                (0..=block.len() - k_f).any(|pos| windows.contains(&block.read_bits(pos, *k_f)))
            }
            ForbiddenIndex::Wide { k_f, pilot } => {
                if *k_f > block.len() || *k_f > pilot.len() {
                    return false;
                }
                (0..=block.len() - k_f).any(|pos| {
                    !pilot
                        .find_occurrences(&block.substring(pos, *k_f), false)
                        .is_empty()
                })
            }
        }
    }
}

impl CodeSpec {
    /// Build a code: generate the pilot, then draw Bernoulli(1/2) blocks from
    /// the seeded generator, rejecting any block sharing a length-`k_f`
    /// window with the pilot, until `catalog_size` distinct blocks are
    /// accepted.
    pub fn make_code(
        n: usize,
        m: usize,
        delta: f64,
        catalog_size: usize,
        seed: u64,
    ) -> Result<CodeSpec> {
        if m < 2 {
            return Err(Error::InvalidParameter(
                "m must be >= 2 (one pilot track plus at least one message track)".into(),
            ));
        }
        if n == 0 || !n.is_multiple_of(m) {
            return Err(Error::InvalidParameter(format!(
                "n = {n} is not a positive multiple of m = {m}"
            )));
        }
        let block_len = n / m;
        if !block_len.is_power_of_two() || block_len < 4 {
            return Err(Error::InvalidParameter(format!(
                "block length n/m = {block_len} must be 2^k_p with k_p >= 2"
            )));
        }
        let k_p = block_len.trailing_zeros();
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
        }
        if catalog_size < 1 {
            return Err(Error::InvalidParameter("catalog size M must be >= 1".into()));
        }
        let k_f = forbidden_len(n, delta);
        if k_f > block_len {
            return Err(Error::Construction(format!(
                "forbidden window k_f = {k_f} exceeds block length {block_len}; \
                 the filter would be vacuous"
            )));
        }

        let pilot = debruijn::generate(k_p)?;
        let index = ForbiddenIndex::build(&pilot, k_f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut catalog: Vec<BitString> = Vec::with_capacity(catalog_size);
        let mut seen: HashSet<BitString> = HashSet::with_capacity(catalog_size);
        let mut rejections = 0usize;
        let window = 10 * catalog_size;
        let mut window_draws = 0usize;
        let mut window_accepts = 0usize;
        while catalog.len() < catalog_size {
            let block = BitString::random(block_len, &mut rng);
            window_draws += 1;
            if index.hits(&block) || !seen.insert(block.clone()) {
                rejections += 1;
            } else {
                window_accepts += 1;
                catalog.push(block);
            }
            if window_draws == window {
                if (window_accepts as f64) < MIN_ACCEPT_RATE * window as f64 {
                    return Err(Error::Construction(format!(
                        "acceptance rate {window_accepts}/{window} below {MIN_ACCEPT_RATE}; \
                         k_f = {k_f} is too small relative to block length {block_len}"
                    )));
                }
                window_draws = 0;
                window_accepts = 0;
            }
        }
        let index = PilotIndex::build(&pilot);
        Ok(CodeSpec { n, m, delta, k_f, pilot, index, catalog, seed, rejections })
    }

    /// Assemble a code from explicit parts, bypassing the construction
    /// filter's geometry requirements (toy codes for tests and tooling).
    /// Blocks must still be distinct, of pilot length, and free of forbidden
    /// windows.
    pub fn from_parts(
        m: usize,
        delta: f64,
        pilot: DeBruijnSeq,
        catalog: Vec<BitString>,
        seed: u64,
    ) -> Result<CodeSpec> {
        if m < 2 {
            return Err(Error::InvalidParameter("m must be >= 2".into()));
        }
        if catalog.is_empty() {
            return Err(Error::InvalidParameter("catalog must be non-empty".into()));
        }
        let block_len = pilot.len();
        let n = m * block_len;
        let k_f = forbidden_len(n, delta);
        let index = ForbiddenIndex::build(&pilot, k_f);
        let mut seen = HashSet::new();
        for (i, block) in catalog.iter().enumerate() {
            if block.len() != block_len {
                return Err(Error::InvalidParameter(format!(
                    "catalog block {i} has length {}, expected {block_len}",
                    block.len()
                )));
            }
            if index.hits(block) {
                return Err(Error::InvalidParameter(format!(
                    "catalog block {i} shares a length-{k_f} window with the pilot"
                )));
            }
            if !seen.insert(block.clone()) {
                return Err(Error::InvalidParameter(format!("catalog block {i} is a duplicate")));
            }
        }
        let index = PilotIndex::build(&pilot);
        Ok(CodeSpec { n, m, delta, k_f, pilot, index, catalog, seed, rejections: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn block_len(&self) -> usize {
        self.n / self.m
    }

    /// Forbidden-window length `ceil((2 + delta) * log2 n)`.
    pub fn k_f(&self) -> usize {
        self.k_f
    }

    /// Minimum usable fragment length `m * k_f`: such a fragment carries at
    /// least `k_f` pilot symbols in every phase hypothesis.
    pub fn n_min(&self) -> usize {
        self.m * self.k_f
    }

    pub fn pilot(&self) -> &DeBruijnSeq {
        &self.pilot
    }

    pub fn catalog(&self) -> &[BitString] {
        &self.catalog
    }

    pub fn catalog_size(&self) -> usize {
        self.catalog.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Candidate blocks rejected while building the catalog.
    pub fn rejections(&self) -> usize {
        self.rejections
    }

    /// Nominal rate `(m - 1) * log2(M) / n` of the index-tuple message space.
    pub fn rate(&self) -> f64 {
        (self.m - 1) as f64 * (self.catalog.len() as f64).log2() / self.n as f64
    }

    /// Interleave the pilot with the selected message blocks:
    /// position `m t + j` carries `pilot[t]` for `j = 0` and
    /// `catalog[u[j-1]][t]` for `j = 1..m-1`.
    pub fn encode(&self, u: &[usize]) -> Result<BitString> {
        if u.len() != self.m - 1 {
            return Err(Error::InvalidParameter(format!(
                "message must select {} blocks, got {}",
                self.m - 1,
                u.len()
            )));
        }
        let mut parts = Vec::with_capacity(self.m);
        parts.push(self.pilot.seq().clone());
        for &idx in u {
            let block = self.catalog.get(idx).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "block index {idx} out of range (catalog size {})",
                    self.catalog.len()
                ))
            })?;
            parts.push(block.clone());
        }
        Ok(BitString::interleave(&parts))
    }

    /// Locate a fragment on the codeword skeleton.
    ///
    /// For each phase residue r, the stride-m subsequence starting at r is
    /// the run of consecutive pilot symbols the fragment would carry if the
    /// pilot sat at local indices ≡ r (mod m). A residue is a candidate when
    /// that run is at least `k_f` long, occurs in the pilot (necessarily
    /// uniquely), and the implied global start keeps the fragment inside the
    /// codeword. The located run covers every pilot position of the
    /// fragment, so a candidate is already fully consistent with the pilot.
    pub fn align_fragment(&self, fragment: &BitString) -> Result<AlignOutcome> {
        if fragment.len() < self.n_min() {
            return Ok(AlignOutcome::TooShort);
        }
        let mut found: Option<Alignment> = None;
        let mut ambiguous = false;
        for residue in 0..self.m {
            let track = fragment.stride_subsequence(residue, self.m);
            if track.len() < self.k_f {
                continue;
            }
            // k_f > k_p always, so the indexed lookup applies; it returns
            // exactly what pilot.locate_unique would.
            let t = if track.len() >= self.pilot.order() as usize {
                match self.index.locate(&self.pilot, &track) {
                    Some(t) => t,
                    None => continue,
                }
            } else {
                match self.pilot.locate_unique(&track)? {
                    Locate::Unique(t) => t,
                    Locate::NotFound | Locate::Ambiguous => continue,
                }
            };
            let offset = self.m * t;
            if offset < residue {
                continue;
            }
            let start = offset - residue;
            if start + fragment.len() > self.n {
                continue;
            }
            let alignment = Alignment { start, residue, pilot_hits: track.len() };
            if found.is_some() {
                ambiguous = true;
            } else {
                found = Some(alignment);
            }
        }
        Ok(match (found, ambiguous) {
            (Some(a), false) => AlignOutcome::Aligned(a),
            (_, true) => AlignOutcome::Unalignable { ambiguous: true },
            (None, false) => AlignOutcome::Unalignable { ambiguous: false },
        })
    }

    /// Recover the catalog index for one message slot from the symbols that
    /// survived decoding (`None` entries are erasures).
    pub fn recover_block(&self, slot: usize, partial: &[Option<bool>]) -> Result<BlockOutcome> {
        if slot >= self.m - 1 {
            return Err(Error::InvalidParameter(format!(
                "slot {slot} out of range (m - 1 = {})",
                self.m - 1
            )));
        }
        if partial.len() != self.block_len() {
            return Err(Error::InvalidParameter(format!(
                "partial symbols length {} != block length {}",
                partial.len(),
                self.block_len()
            )));
        }
        let mut matched = None;
        for (idx, block) in self.catalog.iter().enumerate() {
            let agrees = partial
                .iter()
                .enumerate()
                .all(|(t, sym)| sym.is_none_or(|v| block.get(t) == v));
            if agrees {
                if matched.is_some() {
                    return Ok(BlockOutcome::Erased);
                }
                matched = Some(idx);
            }
        }
        Ok(match matched {
            Some(idx) => BlockOutcome::Recovered(idx),
            None => BlockOutcome::Inconsistent,
        })
    }

    /// Align every fragment, merge the certified symbols into a position
    /// array, and run index recovery per message slot.
    ///
    /// Overlapping writes must agree; a disagreement increments `conflicts`
    /// and permanently voids the position — soundness makes disagreement
    /// impossible, so any occurrence must be surfaced, not voted away.
    /// Ambiguously aligned fragments are dropped entirely for the same
    /// reason.
    pub fn decode(&self, fs: &FragmentSet) -> Result<DecodeReport> {
        #[derive(Clone, Copy, PartialEq)]
        enum Cell {
            Unset,
            Set(bool),
            Void,
        }
        let mut cells = vec![Cell::Unset; self.n];
        let mut report = DecodeReport {
            n: self.n,
            m: self.m,
            symbols: String::new(),
            coverage_recovered: 0.0,
            blocks: Vec::new(),
            misalignments: 0,
            ambiguities: 0,
            conflicts: 0,
            too_short: 0,
            aligned_fragments: 0,
            aligned_length: 0,
        };
        for fragment in fs.fragments() {
            match self.align_fragment(fragment)? {
                AlignOutcome::TooShort => report.too_short += 1,
                AlignOutcome::Unalignable { ambiguous: true } => report.ambiguities += 1,
                AlignOutcome::Unalignable { ambiguous: false } => report.misalignments += 1,
                AlignOutcome::Aligned(a) => {
                    report.aligned_fragments += 1;
                    report.aligned_length += fragment.len();
                    for i in 0..fragment.len() {
                        let pos = a.start + i;
                        let value = fragment.get(i);
                        cells[pos] = match cells[pos] {
                            Cell::Unset => Cell::Set(value),
                            Cell::Set(prev) if prev == value => Cell::Set(value),
                            Cell::Set(_) => {
                                report.conflicts += 1;
                                Cell::Void
                            }
                            Cell::Void => Cell::Void,
                        };
                    }
                }
            }
        }

        let block_len = self.block_len();
        let mut recovered_message = 0usize;
        for slot in 0..self.m - 1 {
            let partial: Vec<Option<bool>> = (0..block_len)
                .map(|t| match cells[self.m * t + slot + 1] {
                    Cell::Set(v) => Some(v),
                    _ => None,
                })
                .collect();
            recovered_message += partial.iter().filter(|s| s.is_some()).count();
            report.blocks.push(self.recover_block(slot, &partial)?);
        }
        report.coverage_recovered =
            recovered_message as f64 / ((self.m - 1) * block_len) as f64;
        report.symbols = cells
            .iter()
            .map(|c| match c {
                Cell::Set(true) => '1',
                Cell::Set(false) => '0',
                _ => '?',
            })
            .collect();
        Ok(report)
    }

    /// Serialize the code description (the catalog is regenerated from the
    /// seed, never stored).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CodeFile {
            n: self.n,
            m: self.m,
            delta: self.delta,
            catalog_size: self.catalog.len(),
            seed: self.seed,
            pilot: self.pilot.seq().to_string(),
        })?)
    }

    /// Rebuild a code from its JSON description, checking the stored pilot
    /// against the regenerated one.
    pub fn from_json(text: &str) -> Result<CodeSpec> {
        let file: CodeFile = serde_json::from_str(text)?;
        let code = CodeSpec::make_code(file.n, file.m, file.delta, file.catalog_size, file.seed)?;
        if code.pilot.seq().to_string() != file.pilot {
            return Err(Error::Parse(
                "stored pilot does not match the regenerated pilot".into(),
            ));
        }
        Ok(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{self, TearConfig};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn make_code_geometry() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 7).unwrap();
        assert_eq!(code.block_len(), 16);
        assert_eq!(code.pilot().order(), 4);
        assert_eq!(code.k_f(), 12);
        assert_eq!(code.n_min(), 48);
        assert!(debruijn::verify(code.pilot().seq(), 4));
        assert_eq!(code.catalog_size(), 8);
    }

    #[test]
    fn catalog_blocks_pass_the_filter() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 3).unwrap();
        for block in code.catalog() {
            assert!(!contains_forbidden(block, code.pilot(), code.k_f()));
        }
        // distinct
        let set: HashSet<_> = code.catalog().iter().collect();
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn too_small_geometry_rejected() {
        // n = 16, m = 4: k_f = 8 > block_len = 4
        assert!(matches!(
            CodeSpec::make_code(16, 4, 0.0, 4, 1),
            Err(Error::Construction(_))
        ));
        assert!(CodeSpec::make_code(60, 4, 0.0, 4, 1).is_err()); // block not 2^k
        assert!(CodeSpec::make_code(64, 1, 0.0, 4, 1).is_err());
    }

    #[test]
    fn forbidden_examples() {
        let pilot = debruijn::generate(4).unwrap();
        // a prefix of the pilot trivially self-matches
        let prefix = pilot.seq().substring(0, 12);
        assert!(contains_forbidden(&prefix, &pilot, 12));
        // generate(4) contains 1111, so the all-ones block hits at k_f = 4
        assert!(contains_forbidden(&bs("1111111111111111"), &pilot, 4));
        // window longer than the block: vacuously false
        assert!(!contains_forbidden(&bs("11"), &pilot, 4));
    }

    #[test]
    fn encode_toy_interleave() {
        // m = 2, pilot 01, single block 11 -> positions 0,2 pilot; 1,3 block
        let pilot = debruijn::generate(1).unwrap();
        let code = CodeSpec::from_parts(2, 0.0, pilot, vec![bs("11")], 0).unwrap();
        assert_eq!(code.encode(&[0]).unwrap(), bs("0111"));
    }

    #[test]
    fn encode_tracks_are_definitional() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 5).unwrap();
        let u = [3usize, 0, 6];
        let cw = code.encode(&u).unwrap();
        assert_eq!(cw.len(), 64);
        assert_eq!(&cw.stride_subsequence(0, 4), code.pilot().seq());
        for j in 1..4 {
            assert_eq!(cw.stride_subsequence(j, 4), code.catalog()[u[j - 1]]);
        }
        assert!(code.encode(&[8, 0, 0]).is_err());
        assert!(code.encode(&[0, 0]).is_err());
    }

    #[test]
    fn align_self_and_window() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 11).unwrap();
        let cw = code.encode(&[1, 2, 3]).unwrap();
        match code.align_fragment(&cw).unwrap() {
            AlignOutcome::Aligned(a) => {
                assert_eq!(a.start, 0);
                assert_eq!(a.residue, 0);
                assert_eq!(a.pilot_hits, 16);
            }
            other => panic!("expected alignment, got {other:?}"),
        }
        // window starting at m: residue 0 again, start m
        let w = cw.substring(4, code.n_min());
        match code.align_fragment(&w).unwrap() {
            AlignOutcome::Aligned(a) => {
                assert_eq!(a.start, 4);
                assert_eq!(a.residue, 0);
            }
            other => panic!("expected alignment, got {other:?}"),
        }
        // every offset certifies, with the phase cycling through residues
        for s in 0..=64 - code.n_min() {
            let f = cw.substring(s, code.n_min());
            match code.align_fragment(&f).unwrap() {
                AlignOutcome::Aligned(a) => {
                    assert_eq!(a.start, s, "offset {s}");
                    assert_eq!(a.residue, (4 - s % 4) % 4);
                    assert_eq!((a.start + a.residue) % 4, 0);
                }
                other => panic!("offset {s}: {other:?}"),
            }
        }
        assert_eq!(
            code.align_fragment(&cw.substring(1, code.n_min() - 1)).unwrap(),
            AlignOutcome::TooShort
        );
    }

    #[test]
    fn decode_whole_codeword_round_trip() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 2).unwrap();
        let u = [5usize, 0, 7];
        let cw = code.encode(&u).unwrap();
        let fs = FragmentSet::from_fragments(vec![cw.clone()]);
        let report = code.decode(&fs).unwrap();
        assert_eq!(report.coverage_recovered, 1.0);
        assert_eq!(report.conflicts, 0);
        assert_eq!(report.misalignments, 0);
        assert_eq!(report.ambiguities, 0);
        assert_eq!(
            report.blocks,
            vec![
                BlockOutcome::Recovered(5),
                BlockOutcome::Recovered(0),
                BlockOutcome::Recovered(7)
            ]
        );
        for i in 0..64 {
            assert_eq!(report.symbol(i), Some(cw.get(i)));
        }
    }

    #[test]
    fn decode_all_short_fragments_erases_everything() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 2).unwrap();
        let cw = code.encode(&[1, 2, 3]).unwrap();
        // chop into 8-bit pieces, all far below N_min = 48
        let fs = FragmentSet::from_fragments(
            (0..8).map(|i| cw.substring(8 * i, 8)).collect(),
        );
        let report = code.decode(&fs).unwrap();
        assert_eq!(report.coverage_recovered, 0.0);
        assert_eq!(report.too_short, 8);
        assert!(report.blocks.iter().all(|b| *b == BlockOutcome::Erased));
        assert!(report.symbols.chars().all(|c| c == '?'));
    }

    #[test]
    fn recover_block_cases() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 13).unwrap();
        let block_len = code.block_len();
        // all symbols known and equal to catalog[3]
        let full: Vec<Option<bool>> =
            (0..block_len).map(|t| Some(code.catalog()[3].get(t))).collect();
        assert_eq!(code.recover_block(0, &full).unwrap(), BlockOutcome::Recovered(3));
        // nothing known: all blocks agree vacuously
        let none: Vec<Option<bool>> = vec![None; block_len];
        assert_eq!(code.recover_block(1, &none).unwrap(), BlockOutcome::Erased);
        // contradict block i at position i: no block can agree
        let mut bad: Vec<Option<bool>> = vec![None; block_len];
        for (i, slot) in bad.iter_mut().enumerate().take(8) {
            *slot = Some(!code.catalog()[i].get(i));
        }
        assert_eq!(code.recover_block(0, &bad).unwrap(), BlockOutcome::Inconsistent);
        assert!(code.recover_block(3, &none).is_err());
    }

    #[test]
    fn exhaustive_round_trip_small_catalog() {
        let code = CodeSpec::make_code(64, 4, 0.0, 8, 21).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let u = [a, b, c];
                    let cw = code.encode(&u).unwrap();
                    let fs = FragmentSet::from_fragments(vec![cw]);
                    let report = code.decode(&fs).unwrap();
                    let got: Vec<_> = report
                        .blocks
                        .iter()
                        .map(|blk| match blk {
                            BlockOutcome::Recovered(i) => *i,
                            other => panic!("{other:?}"),
                        })
                        .collect();
                    assert_eq!(got, u);
                }
            }
        }
    }

    #[test]
    fn indexed_locate_matches_linear_scan() {
        use rand::{Rng, SeedableRng};
        let pilot = debruijn::generate(8).unwrap();
        let index = PilotIndex::build(&pilot);
        for len in [8usize, 9, 20, 100, 256] {
            for start in 0..=256 - len {
                let sample = pilot.seq().substring(start, len);
                assert_eq!(index.locate(&pilot, &sample), Some(start));
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let sample = BitString::random(rng.random_range(8..40), &mut rng);
            let via_scan = match pilot.locate_unique(&sample).unwrap() {
                Locate::Unique(t) => Some(t),
                _ => None,
            };
            assert_eq!(index.locate(&pilot, &sample), via_scan, "{sample}");
        }
    }

    #[test]
    fn threshold_monotone_in_delta() {
        let mut prev = 0;
        for delta in [0.0, 0.1, 0.2, 0.4, 0.6] {
            let code = CodeSpec::make_code(64, 4, delta, 4, 1).unwrap();
            assert!(code.n_min() >= prev);
            prev = code.n_min();
        }
    }

    #[test]
    fn json_round_trip() {
        let code = CodeSpec::make_code(64, 4, 0.1, 8, 77).unwrap();
        let json = code.to_json().unwrap();
        let back = CodeSpec::from_json(&json).unwrap();
        assert_eq!(back, code);
        // tampered pilot detected
        let bad = json.replace(&code.pilot().seq().to_string(), &"0".repeat(16));
        assert!(CodeSpec::from_json(&bad).is_err());
    }

    #[test]
    fn aligned_symbols_match_truth_small() {
        let code = CodeSpec::make_code(1 << 10, 4, 0.1, 8, 3).unwrap();
        let cw = code.encode(&[1, 2, 3]).unwrap();
        for trial in 0..50u64 {
            let cfg = TearConfig::new(1 << 10, 0.02, trial).unwrap();
            let fs = channel::shuffle(&channel::tear(&cw, &cfg), trial ^ 0xABCD);
            let truth = fs.ground_truth().unwrap().to_vec();
            for (frag, origin) in fs.fragments().iter().zip(&truth) {
                if let AlignOutcome::Aligned(a) = code.align_fragment(frag).unwrap() {
                    assert_eq!(a.start, origin.start, "trial {trial}");
                }
            }
            let report = code.decode(&fs).unwrap();
            assert_eq!(report.conflicts, 0);
            assert_eq!(report.misalignments, 0);
            for i in 0..code.n() {
                if let Some(v) = report.symbol(i) {
                    assert_eq!(v, cw.get(i));
                }
            }
        }
    }
}

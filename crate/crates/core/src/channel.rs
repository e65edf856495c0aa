//! The torn-paper channel and its unconstrained variant.
//!
//! The channel cuts a length-n input at i.i.d. Bernoulli(p) boundaries —
//! equivalently into i.i.d. Geometric(p) pieces with the last one truncated —
//! and hands the pieces over in uniformly random order. There are no
//! bit-level errors, losses, or duplications.
//!
//! All thresholds use log base 2.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Channel parameters: block length, per-boundary tearing probability, seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TearConfig {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl TearConfig {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("block length n must be >= 1".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tearing probability must be in (0, 1], got {p}"
            )));
        }
        Ok(TearConfig { n, p, seed })
    }

    /// Config with `p = alpha / log2(n)`.
    pub fn for_alpha(n: usize, alpha: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("n must be >= 2 to derive p from alpha".into()));
        }
        let p = alpha / (n as f64).log2();
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha {alpha} gives p = {p} outside (0, 1] at n = {n}"
            )));
        }
        Self::new(n, p, seed)
    }

    /// The finite-n tearing rate `p * log2(n)`.
    pub fn alpha_hat(&self) -> f64 {
        self.p * (self.n as f64).log2()
    }
}

/// How fragment lengths are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TearMode {
    /// Inverse-CDF Geometric(p) draws; O(1) per fragment.
    Geometric,
    /// One Bernoulli(p) indicator per interior boundary; O(n). Same law,
    /// retained for small-n cross-checks.
    PerBoundary,
}

/// Where a fragment came from in the (pre-shuffle) input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub start: usize,
    pub len: usize,
}

/// A multiset of fragments, optionally carrying hidden ground-truth origins.
///
/// The origins exist so the harness can check alignment soundness against an
/// oracle; decoders only ever see [`fragments`](Self::fragments).
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSet {
    fragments: Vec<BitString>,
    truth: Option<Vec<Origin>>,
}

impl FragmentSet {
    /// Fragment set without ground truth (decoder-side construction, e.g.
    /// when loading a dump file).
    pub fn from_fragments(fragments: Vec<BitString>) -> Self {
        FragmentSet { fragments, truth: None }
    }

    pub fn fragments(&self) -> &[BitString] {
        &self.fragments
    }

    /// Number of fragments (the K statistic).
    pub fn k(&self) -> usize {
        self.fragments.len()
    }

    pub fn total_len(&self) -> usize {
        self.fragments.iter().map(|f| f.len()).sum()
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.fragments.iter().map(|f| f.len())
    }

    /// Harness-only oracle access; decoder code paths must not call this.
    pub fn ground_truth(&self) -> Option<&[Origin]> {
        self.truth.as_deref()
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One Geometric(p) draw with support {1, 2, ...}: Pr(N = k) = (1-p)^(k-1) p.
pub(crate) fn sample_geometric<R: Rng + ?Sized>(rng: &mut R, p: f64) -> usize {
    debug_assert!(p > 0.0 && p <= 1.0);
    if p >= 1.0 {
        return 1;
    }
    // Inverse CDF on V in (0, 1]: N = ceil(ln V / ln(1-p)).
    let v = 1.0 - rng.random::<f64>();
    let n = (v.ln() / (1.0 - p).ln()).ceil();
    (n as usize).max(1)
}

/// Tear `x` into pre-shuffle fragments with ground truth attached.
///
/// Lengths are i.i.d. Geometric(p) with the final fragment truncated so the
/// lengths sum to n (K is the smallest index whose partial sum reaches n).
pub fn tear(x: &BitString, cfg: &TearConfig) -> FragmentSet {
    tear_with_mode(x, cfg, TearMode::Geometric)
}

pub fn tear_with_mode(x: &BitString, cfg: &TearConfig, mode: TearMode) -> FragmentSet {
    assert_eq!(x.len(), cfg.n, "input length must equal cfg.n");
    let mut rng = rng_for(cfg.seed);
    let mut fragments = Vec::new();
    let mut truth = Vec::new();
    match mode {
        TearMode::Geometric => {
            let mut start = 0;
            while start < cfg.n {
                let len = sample_geometric(&mut rng, cfg.p).min(cfg.n - start);
                fragments.push(x.substring(start, len));
                truth.push(Origin { start, len });
                start += len;
            }
        }
        TearMode::PerBoundary => {
            let mut start = 0;
            for boundary in 1..cfg.n {
                if rng.random::<f64>() < cfg.p {
                    fragments.push(x.substring(start, boundary - start));
                    truth.push(Origin { start, len: boundary - start });
                    start = boundary;
                }
            }
            fragments.push(x.substring(start, cfg.n - start));
            truth.push(Origin { start, len: cfg.n - start });
        }
    }
    FragmentSet { fragments, truth: Some(truth) }
}

/// The unconstrained variant: exactly `round(n * p)` fragments drawn from the
/// zero-padded input, so the total output length may differ from n.
///
/// The fragment count is rounded to the nearest positive integer (the
/// rounding is a modeling choice; only `n * p -> infinity` matters
/// asymptotically).
pub fn unconstrained_tear(x: &BitString, cfg: &TearConfig) -> FragmentSet {
    assert_eq!(x.len(), cfg.n, "input length must equal cfg.n");
    let count = ((cfg.n as f64 * cfg.p).round() as usize).max(1);
    let mut rng = rng_for(cfg.seed);
    let mut fragments = Vec::with_capacity(count);
    let mut truth = Vec::with_capacity(count);
    let mut start = 0;
    for _ in 0..count {
        let len = sample_geometric(&mut rng, cfg.p);
        fragments.push(x.window_zero_padded(start, len));
        truth.push(Origin { start, len });
        start += len;
    }
    FragmentSet { fragments, truth: Some(truth) }
}

/// Apply a uniformly random permutation (Fisher–Yates over the seeded
/// generator) to the fragment order; ground truth is permuted consistently.
pub fn shuffle(fs: &FragmentSet, seed: u64) -> FragmentSet {
    let mut perm: Vec<usize> = (0..fs.k()).collect();
    perm.shuffle(&mut rng_for(seed));
    FragmentSet {
        fragments: perm.iter().map(|&i| fs.fragments[i].clone()).collect(),
        truth: fs
            .truth
            .as_ref()
            .map(|t| perm.iter().map(|&i| t[i]).collect()),
    }
}

/// Coverage of the fragment set at threshold gamma.
///
/// Returns `c_gamma` — the fraction of the n input positions lying in
/// fragments of length at least `gamma * log2(n)` — together with the
/// filtered set `Y_gamma` containing exactly those fragments.
pub fn coverage(fs: &FragmentSet, gamma: f64, n: usize) -> Result<(f64, FragmentSet)> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "coverage threshold gamma must be >= 0, got {gamma}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let threshold = gamma * (n as f64).log2();
    let keep: Vec<usize> = (0..fs.k())
        .filter(|&i| fs.fragments[i].len() as f64 >= threshold)
        .collect();
    let filtered = FragmentSet {
        fragments: keep.iter().map(|&i| fs.fragments[i].clone()).collect(),
        truth: fs
            .truth
            .as_ref()
            .map(|t| keep.iter().map(|&i| t[i]).collect()),
    };
    let c = filtered.total_len() as f64 / n as f64;
    Ok((c, filtered))
}

/// Write a fragment dump: header line `n=<n> p=<p> seed=<seed>`, then one
/// fragment per line as a 0/1 string.
pub fn write_fragment_dump(w: &mut impl Write, cfg: &TearConfig, fs: &FragmentSet) -> Result<()> {
    writeln!(w, "n={} p={} seed={}", cfg.n, cfg.p, cfg.seed)?;
    for f in fs.fragments() {
        writeln!(w, "{f}")?;
    }
    Ok(())
}

/// Read a fragment dump produced by [`write_fragment_dump`].
pub fn read_fragment_dump(r: impl BufRead) -> Result<(TearConfig, FragmentSet)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty fragment dump".into()))??;
    let mut n = None;
    let mut p = None;
    let mut seed = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
            "p" => p = Some(value.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?),
            other => return Err(Error::Parse(format!("unknown header field {other:?}"))),
        }
    }
    let (n, p, seed) = match (n, p, seed) {
        (Some(n), Some(p), Some(seed)) => (n, p, seed),
        _ => return Err(Error::Parse("header must contain n=, p=, seed=".into())),
    };
    let mut fragments = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        fragments.push(line.parse()?);
    }
    Ok((TearConfig::new(n, p, seed)?, FragmentSet::from_fragments(fragments)))
}

/// Write truth intervals, one `start,len` pair per line.
pub fn write_truth_sidecar(w: &mut impl Write, fs: &FragmentSet) -> Result<()> {
    let truth = fs
        .ground_truth()
        .ok_or_else(|| Error::InvalidParameter("fragment set carries no ground truth".into()))?;
    for o in truth {
        writeln!(w, "{},{}", o.start, o.len)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn p_one_cuts_everywhere() {
        let x = bs("1010");
        let cfg = TearConfig::new(4, 1.0, 1).unwrap();
        for mode in [TearMode::Geometric, TearMode::PerBoundary] {
            let fs = tear_with_mode(&x, &cfg, mode);
            assert_eq!(fs.k(), 4);
            assert!(fs.lengths().all(|l| l == 1));
            assert_eq!(fs.fragments()[1], bs("0"));
        }
    }

    #[test]
    fn tiny_p_keeps_input_whole() {
        // With p = 1e-12 the first geometric draw exceeds n = 64 for any
        // realistic seed; assert the no-cut limit.
        let mut rng = rng_for(42);
        let x = BitString::random(64, &mut rng);
        let cfg = TearConfig::new(64, 1e-12, 7).unwrap();
        let fs = tear(&x, &cfg);
        assert_eq!(fs.k(), 1);
        assert_eq!(fs.fragments()[0], x);
        assert_eq!(fs.ground_truth().unwrap()[0], Origin { start: 0, len: 64 });
    }

    #[test]
    fn partition_invariant() {
        let mut rng = rng_for(5);
        let x = BitString::random(512, &mut rng);
        let cfg = TearConfig::new(512, 0.07, 99).unwrap();
        let fs = tear(&x, &cfg);
        assert_eq!(fs.total_len(), 512);
        let truth = fs.ground_truth().unwrap();
        let mut expected_start = 0;
        for (frag, o) in fs.fragments().iter().zip(truth) {
            assert_eq!(o.start, expected_start);
            assert_eq!(o.len, frag.len());
            assert_eq!(*frag, x.substring(o.start, o.len));
            expected_start += o.len;
        }
        assert_eq!(expected_start, 512);
    }

    #[test]
    fn shuffle_preserves_multiset_and_truth() {
        let mut rng = rng_for(11);
        let x = BitString::random(256, &mut rng);
        let cfg = TearConfig::new(256, 0.1, 3).unwrap();
        let fs = tear(&x, &cfg);
        let shuffled = shuffle(&fs, 17);
        let mut a: Vec<String> = fs.fragments().iter().map(|f| f.to_string()).collect();
        let mut b: Vec<String> = shuffled.fragments().iter().map(|f| f.to_string()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        // each fragment still matches its (permuted) origin
        let truth = shuffled.ground_truth().unwrap();
        for (frag, o) in shuffled.fragments().iter().zip(truth) {
            assert_eq!(*frag, x.substring(o.start, o.len));
        }
    }

    #[test]
    fn shuffle_of_single_fragment_is_identity() {
        let fs = FragmentSet::from_fragments(vec![bs("0110")]);
        assert_eq!(shuffle(&fs, 123), fs);
    }

    #[test]
    fn shuffle_is_uniform_on_two_fragments() {
        let fs = FragmentSet::from_fragments(vec![bs("0"), bs("1")]);
        let mut first_stays = 0usize;
        let trials = 10_000;
        for seed in 0..trials {
            if shuffle(&fs, seed as u64).fragments()[0] == bs("0") {
                first_stays += 1;
            }
        }
        let freq = first_stays as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq = {freq}");
    }

    #[test]
    fn unconstrained_count_is_exact() {
        let mut rng = rng_for(2);
        for &(n, p) in &[(8usize, 0.5f64), (100, 0.13), (64, 1.0), (10, 0.04)] {
            let x = BitString::random(n, &mut rng);
            let cfg = TearConfig::new(n, p, 77).unwrap();
            let fs = unconstrained_tear(&x, &cfg);
            assert_eq!(fs.k(), ((n as f64 * p).round() as usize).max(1));
        }
    }

    #[test]
    fn unconstrained_p_one_covers_input_exactly() {
        let x = bs("10110010");
        let cfg = TearConfig::new(8, 1.0, 5).unwrap();
        let fs = unconstrained_tear(&x, &cfg);
        assert_eq!(fs.k(), 8);
        assert!(fs.lengths().all(|l| l == 1));
        let glued: String = fs.fragments().iter().map(|f| f.to_string()).collect();
        assert_eq!(glued, x.to_string());
    }

    #[test]
    fn unconstrained_matches_replayed_draws() {
        // Independent replay: draw the same geometric lengths with a fresh
        // generator and rebuild the expected windows from the padded input.
        let x = bs("10110010");
        let cfg = TearConfig::new(8, 0.5, 1234).unwrap();
        let fs = unconstrained_tear(&x, &cfg);
        let mut rng = rng_for(1234);
        let mut start = 0;
        for frag in fs.fragments() {
            let len = sample_geometric(&mut rng, 0.5);
            assert_eq!(frag.len(), len);
            assert_eq!(*frag, x.window_zero_padded(start, len));
            start += len;
        }
    }

    #[test]
    fn mean_fragment_length_and_k_concentrate() {
        // fragment lengths do not depend on the input contents
        let n = 1 << 20;
        let p = 1.0 / 20.0;
        let x = BitString::zeros(n);
        let trials = 1000;
        let mut ks = Vec::with_capacity(trials);
        for trial in 0..trials {
            let cfg = TearConfig::new(n, p, trial as u64).unwrap();
            ks.push(tear(&x, &cfg).k() as f64);
        }
        let total_k: f64 = ks.iter().sum();
        let mean_len = (n * trials) as f64 / total_k;
        assert!((19.0..=21.0).contains(&mean_len), "mean length {mean_len}");

        let k_mean = total_k / trials as f64;
        let expected = 1.0 + (n as f64 - 1.0) * p;
        let var = ks.iter().map(|k| (k - k_mean) * (k - k_mean)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!(
            (k_mean - expected).abs() <= 3.0 * se,
            "K mean {k_mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn coverage_gamma_zero_is_one() {
        let mut rng = rng_for(8);
        let x = BitString::random(128, &mut rng);
        let cfg = TearConfig::new(128, 0.2, 4).unwrap();
        let fs = tear(&x, &cfg);
        let (c, y) = coverage(&fs, 0.0, 128).unwrap();
        assert_eq!(c, 1.0);
        assert_eq!(y.k(), fs.k());
    }

    #[test]
    fn coverage_small_example() {
        // n = 16, lengths {8, 5, 3}, gamma = 1 -> threshold log2(16) = 4
        let fs = FragmentSet::from_fragments(vec![
            bs("00000000"),
            bs("11111"),
            bs("010"),
        ]);
        let (c, y) = coverage(&fs, 1.0, 16).unwrap();
        assert_eq!(c, 13.0 / 16.0);
        assert_eq!(y.k(), 2);
        assert!(coverage(&fs, -0.1, 16).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let mut rng = rng_for(21);
        let x = BitString::random(96, &mut rng);
        let cfg = TearConfig::new(96, 0.125, 9).unwrap();
        let fs = shuffle(&tear(&x, &cfg), 10);
        let mut buf = Vec::new();
        write_fragment_dump(&mut buf, &cfg, &fs).unwrap();
        let (cfg2, fs2) = read_fragment_dump(buf.as_slice()).unwrap();
        assert_eq!(cfg2, cfg);
        assert_eq!(fs2.fragments(), fs.fragments());
        assert!(fs2.ground_truth().is_none());
    }

    #[test]
    fn config_validation() {
        assert!(TearConfig::new(0, 0.5, 1).is_err());
        assert!(TearConfig::new(4, 0.0, 1).is_err());
        assert!(TearConfig::new(4, 1.5, 1).is_err());
        assert!(TearConfig::for_alpha(16, 8.0, 1).is_err()); // p would be 2
        let cfg = TearConfig::for_alpha(1 << 20, 1.0, 1).unwrap();
        assert!((cfg.p - 0.05).abs() < 1e-12);
        assert!((cfg.alpha_hat() - 1.0).abs() < 1e-12);
    }
}

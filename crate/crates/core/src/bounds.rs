//! Closed-form rates, outer bounds, and asymptotic identities for the
//! torn-paper channel, all as functions of `alpha = p * log2(n)` in the large
//! blocklength limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

/// Channel capacity `e^{-alpha}`.
pub fn capacity(alpha: f64) -> Result<f64> {
    require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
    Ok((-alpha).exp())
}

/// Capacity `(1 - alpha)^+` of the deterministic-tearing baseline, where all
/// fragments have the fixed length 1/p.
pub fn det_capacity(alpha: f64) -> f64 {
    (1.0 - alpha).max(0.0)
}

/// Finite-L outer bound `alpha e^{-alpha} / (L (1 - e^{-alpha/L}))`.
///
/// Non-increasing in L and converging to `e^{-alpha}`; at `alpha = 0` the
/// value is 1 by continuity.
pub fn converse_bound(alpha: f64, l: u32) -> Result<f64> {
    require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
    require(l >= 1, || "L must be a positive integer".into())?;
    if alpha == 0.0 {
        return Ok(1.0);
    }
    // L (1 - e^{-a/L}) written via expm1 so large L stays accurate.
    let denom = -(l as f64) * (-alpha / l as f64).exp_m1();
    Ok(alpha * (-alpha).exp() / denom)
}

/// Tail of the limiting Exponential(alpha) fragment-length law:
/// `Pr(N / log2 n >= beta) -> e^{-alpha beta}`.
pub fn exp_tail(alpha: f64, beta: f64) -> Result<f64> {
    require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
    require(beta >= 0.0, || format!("beta must be >= 0, got {beta}"))?;
    Ok((-alpha * beta).exp())
}

/// Limiting weighted tail `E[N 1{N >= gamma log2 n}] / log2 n ->
/// (gamma + 1/alpha) e^{-alpha gamma}`.
pub fn exp_weighted_tail(alpha: f64, gamma: f64) -> Result<f64> {
    require(alpha > 0.0, || format!("alpha must be > 0, got {alpha}"))?;
    require(gamma >= 0.0, || format!("gamma must be >= 0, got {gamma}"))?;
    Ok((gamma + 1.0 / alpha) * (-alpha * gamma).exp())
}

/// Limiting expected coverage `E[c_gamma] -> (alpha gamma + 1) e^{-alpha gamma}`.
pub fn coverage_expect(alpha: f64, gamma: f64) -> Result<f64> {
    require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
    require(gamma >= 0.0, || format!("gamma must be >= 0, got {gamma}"))?;
    Ok((alpha * gamma + 1.0) * (-alpha * gamma).exp())
}

/// Asymptotic coverage of the pilot-interleaved scheme with pilot fraction
/// beta: `A(beta) = (2 alpha / beta + 1) e^{-2 alpha / beta}`.
///
/// Equals [`coverage_expect`]`(alpha, 2/beta)`: the scheme recovers exactly
/// the fragments longer than `(2 / beta) log2 n`.
pub fn coverage_a(alpha: f64, beta: f64) -> Result<f64> {
    require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
    require(beta > 0.0 && beta <= 1.0, || {
        format!("beta must be in (0, 1], got {beta}")
    })?;
    coverage_expect(alpha, 2.0 / beta)
}

/// Expected fraction of positions lying in fragments of length >= `threshold`
/// at finite n, under the i.i.d. Geometric(p) model:
/// `1 - sum_{k=1}^{T-1} k (1-p)^{k-1} p^2`.
pub fn finite_coverage(n: usize, p: f64, threshold: usize) -> Result<f64> {
    require(n >= 1, || "n must be >= 1".into())?;
    require(p > 0.0 && p <= 1.0, || format!("p must be in (0, 1], got {p}"))?;
    require(threshold >= 1, || "threshold must be >= 1".into())?;
    let q = 1.0 - p;
    let mut sum = 0.0;
    let mut qpow = 1.0; // (1-p)^(k-1)
    for k in 1..threshold {
        sum += k as f64 * qpow * p * p;
        qpow *= q;
    }
    Ok(1.0 - sum)
}

/// Rate of the achievability decoder that keeps fragments of length at least
/// `gamma log2 n`: `(1 + alpha gamma - alpha) e^{-alpha gamma}`. Maximized at
/// `gamma = 1` with value `e^{-alpha}`.
pub fn achievable_rate(alpha: f64, gamma: f64) -> Result<f64> {
    require(alpha >= 0.0, || format!("alpha must be >= 0, got {alpha}"))?;
    require(gamma >= 0.0, || format!("gamma must be >= 0, got {gamma}"))?;
    Ok((1.0 + alpha * gamma - alpha) * (-alpha * gamma).exp())
}

/// Result of maximizing the interleaved-pilot rate over the pilot fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterleaveRate {
    pub rate: f64,
    pub beta_star: f64,
}

const GRID_STEP: f64 = 1e-4;
const GOLDEN_TOL: f64 = 1e-8;

fn interleave_objective(alpha: f64, beta: f64) -> f64 {
    // A(beta) (1 - beta); beta in (0, 1)
    (2.0 * alpha / beta + 1.0) * (-2.0 * alpha / beta).exp() * (1.0 - beta)
}

/// Maximize `A(beta) (1 - beta)` over `beta in (0, 1)`.
///
/// A 1e-4 grid scan locates the global maximum (guarding against local
/// maxima), then golden-section search refines the bracket to 1e-8.
pub fn interleave_rate(alpha: f64) -> Result<InterleaveRate> {
    require(alpha > 0.0, || format!("alpha must be > 0, got {alpha}"))?;
    let cells = (1.0 / GRID_STEP) as usize; // 10^4 cells over (0, 1)
    let mut best_i = 1;
    let mut best = f64::NEG_INFINITY;
    for i in 1..cells {
        let v = interleave_objective(alpha, i as f64 / cells as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = (best_i - 1) as f64 / cells as f64;
    let hi = ((best_i + 1) as f64 / cells as f64).min(1.0);
    let (beta_star, rate) = golden_section_max(|b| interleave_objective(alpha, b), lo, hi);
    Ok(InterleaveRate { rate, beta_star })
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > GOLDEN_TOL {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Analytic values at one alpha, as emitted by the `bounds` CLI subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub alpha: f64,
    pub capacity: f64,
    pub det_capacity: f64,
    pub converse: Vec<ConverseEntry>,
    pub interleave_rate: f64,
    pub beta_star: f64,
    /// A(beta) at each requested pilot fraction.
    pub coverage_a: Vec<AtPoint>,
    /// (alpha gamma + 1) e^{-alpha gamma} at each requested threshold.
    pub coverage_expect: Vec<AtPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseEntry {
    pub l: u32,
    pub value: f64,
}

/// A formula evaluated at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtPoint {
    pub at: f64,
    pub value: f64,
}

/// Evaluate every closed form at one alpha: the converse bound at each
/// requested L, and the coverage formulas at each requested beta and gamma.
pub fn bound_set(alpha: f64, ls: &[u32], betas: &[f64], gammas: &[f64]) -> Result<BoundSet> {
    let converse = ls
        .iter()
        .map(|&l| Ok(ConverseEntry { l, value: converse_bound(alpha, l)? }))
        .collect::<Result<Vec<_>>>()?;
    let coverage_a_entries = betas
        .iter()
        .map(|&b| Ok(AtPoint { at: b, value: coverage_a(alpha, b)? }))
        .collect::<Result<Vec<_>>>()?;
    let coverage_expect_entries = gammas
        .iter()
        .map(|&g| Ok(AtPoint { at: g, value: coverage_expect(alpha, g)? }))
        .collect::<Result<Vec<_>>>()?;
    let ir = if alpha > 0.0 {
        interleave_rate(alpha)?
    } else {
        // continuity: no tearing, no pilot needed
        InterleaveRate { rate: 1.0, beta_star: 0.0 }
    };
    Ok(BoundSet {
        alpha,
        capacity: capacity(alpha)?,
        det_capacity: det_capacity(alpha),
        converse,
        interleave_rate: ir.rate,
        beta_star: ir.beta_star,
        coverage_a: coverage_a_entries,
        coverage_expect: coverage_expect_entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_INV: f64 = 0.36787944117144233;

    #[test]
    fn capacity_values() {
        assert_eq!(capacity(0.0).unwrap(), 1.0);
        assert!((capacity(2.0f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!((capacity(1.0).unwrap() - E_INV).abs() < 1e-15);
        assert!(capacity(-0.1).is_err());
    }

    #[test]
    fn det_capacity_values() {
        assert_eq!(det_capacity(0.0), 1.0);
        assert_eq!(det_capacity(1.0), 0.0);
        assert_eq!(det_capacity(0.25), 0.75);
        assert_eq!(det_capacity(3.0), 0.0);
    }

    #[test]
    fn converse_values() {
        let v = converse_bound(1.0, 1).unwrap();
        assert!((v - E_INV / (1.0 - E_INV)).abs() < 1e-12);
        assert!((v - 0.581977).abs() < 1e-6);
        assert!((converse_bound(1.0, 1_000_000).unwrap() - E_INV).abs() < 1e-6);
        assert_eq!(converse_bound(0.0, 4).unwrap(), 1.0);
        assert!(converse_bound(1.0, 0).is_err());
    }

    #[test]
    fn converse_monotone_in_l() {
        let mut prev = f64::INFINITY;
        for l in 1..=64 {
            let v = converse_bound(0.5, l).unwrap();
            assert!(v <= prev + 1e-15, "L={l}");
            prev = v;
        }
    }

    #[test]
    fn tail_identities() {
        assert_eq!(exp_tail(2.3, 0.0).unwrap(), 1.0);
        assert!((exp_weighted_tail(1.0, 1.0).unwrap() - 2.0 * E_INV).abs() < 1e-12);
        for &alpha in &[0.25, 0.7, 1.0, 2.0] {
            for &gamma in &[0.0, 0.5, 1.0, 3.0] {
                let lhs = coverage_expect(alpha, gamma).unwrap();
                let rhs = alpha * exp_weighted_tail(alpha, gamma).unwrap();
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coverage_a_values() {
        assert!((coverage_a(1.0, 1.0).unwrap() - 3.0 * (-2.0f64).exp()).abs() < 1e-12);
        assert!((coverage_a(1.0, 1.0).unwrap() - 0.406006).abs() < 1e-6);
        // alpha -> 0: no tearing, full coverage
        assert!(coverage_a(1e-9, 0.5).unwrap() > 0.999999);
        assert!(coverage_a(1.0, 0.0).is_err());
        for &alpha in &[0.3, 1.0, 2.0] {
            for &beta in &[0.1, 0.5, 0.9, 1.0] {
                let a = coverage_a(alpha, beta).unwrap();
                let b = coverage_expect(alpha, 2.0 / beta).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn finite_coverage_values() {
        assert_eq!(finite_coverage(16, 0.3, 1).unwrap(), 1.0);
        assert_eq!(finite_coverage(16, 1.0, 2).unwrap(), 0.0);
        // full sum telescopes to 0 as T grows
        assert!(finite_coverage(1 << 20, 0.05, 4000).unwrap() < 1e-12);
        // closed-form cross-check via memorylessness:
        // E[N 1{N>=T}] / E[N] = (1-p)^(T-1) (T-1+1/p) p
        let (p, t) = (0.05f64, 40usize);
        let direct = (1.0 - p).powi(t as i32 - 1) * ((t - 1) as f64 + 1.0 / p) * p;
        assert!((finite_coverage(1 << 20, p, t).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn finite_coverage_approaches_asymptotic_a() {
        // n = 2^20, alpha = 1 (p = 0.05), threshold 2 log2 n = 40
        let finite = finite_coverage(1 << 20, 0.05, 40).unwrap();
        let asymptotic = coverage_a(1.0, 1.0).unwrap();
        assert!((finite - asymptotic).abs() <= 0.02, "{finite} vs {asymptotic}");
    }

    #[test]
    fn achievable_rate_peaks_at_gamma_one() {
        for &alpha in &[0.25, 0.5, 1.0, 2.0] {
            let peak = achievable_rate(alpha, 1.0).unwrap();
            assert!((peak - capacity(alpha).unwrap()).abs() < 1e-12);
            assert!(achievable_rate(alpha, 0.9).unwrap() < peak);
            assert!(achievable_rate(alpha, 1.1).unwrap() < peak);
        }
    }

    #[test]
    fn interleave_rate_at_one() {
        let ir = interleave_rate(1.0).unwrap();
        assert!((ir.rate - 0.0666).abs() < 5e-4, "rate = {}", ir.rate);
        assert!((ir.beta_star - 0.69).abs() < 0.01, "beta* = {}", ir.beta_star);
        assert!(interleave_rate(0.0).is_err());
    }

    #[test]
    fn interleave_rate_small_alpha_approaches_one() {
        // the maximum at alpha = 0.01 sits just under 0.9 (~0.8989)
        assert!(interleave_rate(0.01).unwrap().rate >= 0.89);
        assert!(interleave_rate(0.005).unwrap().rate >= 0.93);
        assert!(interleave_rate(0.0005).unwrap().rate >= 0.98);
    }

    #[test]
    fn inner_bound_below_capacity() {
        let mut alpha = 0.1;
        while alpha <= 3.0 {
            let ir = interleave_rate(alpha).unwrap();
            assert!(ir.rate <= capacity(alpha).unwrap() + 1e-12, "alpha={alpha}");
            alpha += 0.1;
        }
    }

    #[test]
    fn bound_set_json_round_trip() {
        let b = bound_set(1.0, &[1, 8, 64], &[0.5, 1.0], &[1.0]).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        let back: BoundSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
        assert_eq!(b.converse.len(), 3);
        assert_eq!(b.coverage_a.len(), 2);
        assert!((b.coverage_expect[0].value - 2.0 * E_INV).abs() < 1e-12);
    }
}

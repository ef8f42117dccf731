//! Log-domain kernel for the tilted Stirling-ratio distribution.
//!
//! The Stirling ratio `M(k) = k^k e^{-k} / k!` is the per-count maximized
//! Poisson likelihood. `M` is not summable on its own, but tilting by
//! `e^{-ak}` with any `a > 0` yields a proper distribution
//! `P_a(k) = M(k) e^{-ak} / C_a` with partition function
//! `C_a = sum_k k^k e^{-(1+a)k} / k!`.
//!
//! This module provides:
//! - `log_stirling_ratio` / `ln_stirling_ratio`: `M(k)` in the log domain,
//!   accurate to ~1e-14 absolute for all `k` (Robbins-refined Stirling series
//!   for large `k`, exact factorials below).
//! - [`TiltedStirling`]: a frozen `P_a` with certified truncation — the sum
//!   stops only once analytic tail bounds fall below the requested tolerance.
//! - [`solve_tilt`]: the moment-condition solver for `m * E[N_1] = n` by
//!   bisection (the mean is strictly decreasing in the tilt).
//! - [`ClosedFormTilt`]: O(1) evaluation of `C_a` and its moments through the
//!   tree-function identity `sum_{k>=1} k^k z^k / k! = T/(1-T)` where
//!   `T e^{-T} = z = e^{-(1+a)}`; used as a fast path and as an independent
//!   cross-check of the summation route.

use crate::bits::LogWeight;
use crate::error::{Error, Result};

/// Smallest accepted tilt. Below this the normalizer grows like `1/sqrt(2a)`
/// and the certified truncation index exceeds any practical table size.
pub const TILT_FLOOR: f64 = 1e-8;

const LN_2PI: f64 = 1.837_877_066_409_345_6;
const DEFAULT_TOL: f64 = 1e-12;

/// Exact `k!` as u64 for k <= 20.
const FACTORIALS: [u64; 21] = [
    1,
    1,
    2,
    6,
    24,
    120,
    720,
    5040,
    40320,
    362880,
    3628800,
    39916800,
    479001600,
    6227020800,
    87178291200,
    1307674368000,
    20922789888000,
    355687428096000,
    6402373705728000,
    121645100408832000,
    2432902008176640000,
];

/// ln(k!) — exact table through 20!, Stirling series with four correction
/// terms beyond (absolute error below 1e-15 nats).
pub fn ln_factorial(k: u64) -> f64 {
    if k <= 20 {
        return (FACTORIALS[k as usize] as f64).ln();
    }
    let x = k as f64 + 1.0;
    let x2 = x * x;
    let corr = (((-1.0 / 1680.0 / x2 + 1.0 / 1260.0) / x2 - 1.0 / 360.0) / x2 + 1.0 / 12.0) / x;
    (x - 0.5) * x.ln() - x + 0.5 * LN_2PI + corr
}

/// ln C(n, k) for the subset-description ledger lines.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Robbins remainder series: `r_k` with `M(k) = (2 pi k)^{-1/2} e^{-r_k}` and
/// `1/(12k+1) < r_k < 1/(12k)` strictly.
fn robbins_remainder(k: f64) -> f64 {
    let k2 = k * k;
    (((-1.0 / 1680.0 / k2 + 1.0 / 1260.0) / k2 - 1.0 / 360.0) / k2 + 1.0 / 12.0) / k
}

/// ln M(k) in nats. `M(0) = 1` by the empty-product convention `0^0 = 1`.
///
/// For small `k` this is `k ln k - k - ln k!` on exact factorials; from 16 up
/// the Robbins form avoids the cancellation of the direct difference.
pub fn ln_stirling_ratio(k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    if k < 16 {
        kf * kf.ln() - kf - (FACTORIALS[k as usize] as f64).ln()
    } else {
        -0.5 * (LN_2PI + kf.ln()) - robbins_remainder(kf)
    }
}

/// log2 M(k) in bits.
pub fn log_stirling_ratio(k: u64) -> LogWeight {
    LogWeight::from_ln(ln_stirling_ratio(k))
}

/// Raw streaming sums of `t_k = M(k) e^{-ak}` with certified tail bounds.
struct RawMoments {
    /// Partial sum including the k = 0 term.
    c: f64,
    s1: f64,
    s2: f64,
    k_stop: u64,
    /// Bound on the omitted mass beyond `k_stop`.
    mass_tail: f64,
}

/// Streams terms until every accumulated quantity has a certified relative
/// tail below `tol`. When `table` is given, terms for k <= `table_cap` are
/// recorded (the moment loop keeps running past the cap).
fn raw_moments(a: f64, tol: f64, mut table: Option<(&mut Vec<f64>, usize)>) -> RawMoments {
    // Mass tail:  sum_{j>k} M(j) e^{-aj} <= (2pi(k+1))^{-1/2} e^{-a(k+1)} / (1 - e^{-a}).
    // Moment tail: for k >= 3/a,
    //   sum_{j>k} j^2 M(j) e^{-aj} <= (2pi)^{-1/2} k^{3/2} e^{-ak} e^{-a/2} / (1 - e^{-a/2}),
    // since j^{3/2} e^{-aj/2} is nonincreasing there; divide by k (resp. k^2)
    // for the first moment (resp. mass).
    let one_minus_q = -(-a).exp_m1();
    let one_minus_qh = -(-a / 2.0).exp_m1();
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();

    let mut c = 0.0f64;
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    let k_moments = (3.0 / a).max(1.0);

    let mut k: u64 = 0;
    loop {
        let kf = k as f64;
        let t = (ln_stirling_ratio(k) - a * kf).exp();
        c += t;
        s1 += kf * t;
        s2 += kf * kf * t;
        if let Some((buf, cap)) = table.as_mut() {
            if k as usize <= *cap {
                buf.push(t);
            }
        }

        if k >= 1 && kf >= k_moments {
            let b2 = inv_sqrt_2pi * kf.powf(1.5) * (-a * kf).exp() * (-a / 2.0).exp()
                / one_minus_qh;
            let b1 = b2 / kf;
            let b0 = inv_sqrt_2pi / (kf + 1.0).sqrt() * (-a * (kf + 1.0)).exp() / one_minus_q;
            if b2 <= tol * s2 && b1 <= tol * s1 && b0 <= tol * c {
                return RawMoments {
                    c,
                    s1,
                    s2,
                    k_stop: k,
                    mass_tail: b0,
                };
            }
        }
        k += 1;
    }
}

/// The tilted Stirling-ratio distribution `P_a`, frozen after construction.
///
/// Holds the normalizer (kept as `C_a - 1` so that large-tilt comparisons
/// retain full relative precision), the truncated pmf table with cumulative
/// sums, the certified tail mass, and the first two moments.
#[derive(Debug, Clone)]
pub struct TiltedStirling {
    a: f64,
    c_minus_1: f64,
    mass_tail_bound: f64,
    normalizer: f64,
    ln_normalizer: f64,
    pmf: Vec<f64>,
    cum: Vec<f64>,
    tail_mass: f64,
    mean: f64,
    second_moment: f64,
}

impl TiltedStirling {
    /// Build with the default certified tail (< 1e-12 of the total mass).
    pub fn new(a: f64) -> Result<Self> {
        Self::build(a, DEFAULT_TOL, usize::MAX)
    }

    /// Build with an explicit tolerance in `(0, 1e-9]`. The stored table is
    /// always at least as tight as the 1e-12 default.
    pub fn with_tolerance(a: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-9) {
            return Err(Error::BadTolerance(tol));
        }
        Self::build(a, tol.min(DEFAULT_TOL), usize::MAX)
    }

    /// Build with the pmf table capped at `max_k` entries past zero; moments
    /// and normalizer still run to full tolerance. The tail mass then covers
    /// everything beyond the cap.
    pub(crate) fn with_table_cap(a: f64, max_k: usize) -> Result<Self> {
        Self::build(a, DEFAULT_TOL, max_k)
    }

    fn build(a: f64, tol: f64, table_cap: usize) -> Result<Self> {
        if !(a > 0.0) || a.is_nan() {
            return Err(Error::NonPositiveTilt(a));
        }
        if a < TILT_FLOOR {
            return Err(Error::TiltBelowFloor { a, floor: TILT_FLOOR });
        }
        let mut terms: Vec<f64> = Vec::new();
        let raw = raw_moments(a, tol, Some((&mut terms, table_cap)));

        let c_minus_1 = raw.c - 1.0;
        let normalizer = raw.c + 0.5 * raw.mass_tail;
        let ln_normalizer = (c_minus_1 + 0.5 * raw.mass_tail).ln_1p();

        let mut cum = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        let mut pmf = terms;
        for t in pmf.iter_mut() {
            *t /= normalizer;
            acc += *t;
            cum.push(acc);
        }
        let tail_mass = 1.0 - acc;

        Ok(TiltedStirling {
            a,
            c_minus_1,
            mass_tail_bound: raw.mass_tail,
            normalizer,
            ln_normalizer,
            pmf,
            cum,
            tail_mass,
            mean: (raw.s1 / normalizer).min(1.0 / (2.0 * a)),
            second_moment: raw.s2 / normalizer,
        })
    }

    pub fn tilt(&self) -> f64 {
        self.a
    }

    /// Truncation index K of the stored table.
    pub fn truncation(&self) -> u64 {
        (self.pmf.len() - 1) as u64
    }

    /// `C_a` as a plain float.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `C_a - 1`, summed directly; keeps relative precision when `C_a` is
    /// within an ulp of 1.
    pub fn normalizer_minus_1(&self) -> f64 {
        self.c_minus_1
    }

    /// Certified bound on the mass omitted from the normalizer sum.
    pub fn normalizer_tail_bound(&self) -> f64 {
        self.mass_tail_bound
    }

    pub fn log_normalizer(&self) -> LogWeight {
        LogWeight::from_ln(self.ln_normalizer)
    }

    pub(crate) fn ln_normalizer(&self) -> f64 {
        self.ln_normalizer
    }

    /// `P_a(k)`; table lookup below the truncation, direct formula beyond, so
    /// the pmf is defined on all of `0..infinity`.
    pub fn pmf(&self, k: u64) -> f64 {
        match self.pmf.get(k as usize) {
            Some(&p) => p,
            None => self.ln_pmf(k).exp(),
        }
    }

    /// ln P_a(k) in nats.
    pub fn ln_pmf(&self, k: u64) -> f64 {
        ln_stirling_ratio(k) - self.a * k as f64 - self.ln_normalizer
    }

    /// Cumulative probabilities over `0..=K`.
    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    /// Probability mass beyond the stored table; `cum[K] + tail_mass == 1`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `E[N_1]`, strictly decreasing in the tilt.
    pub fn expected_count(&self) -> f64 {
        self.mean
    }

    /// `E[N_1^2]`, used by the mixture Laplace-width bound.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }
}

/// Normalizer and moments at tilt `a` without building a table.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TiltMoments {
    pub c_minus_1: f64,
    pub ln_c: f64,
    pub mean: f64,
    pub second_moment: f64,
}

pub(crate) fn tilt_moments(a: f64) -> Result<TiltMoments> {
    if !(a > 0.0) || a.is_nan() {
        return Err(Error::NonPositiveTilt(a));
    }
    if a < TILT_FLOOR {
        return Err(Error::TiltBelowFloor { a, floor: TILT_FLOOR });
    }
    let raw = raw_moments(a, DEFAULT_TOL, None);
    let c_minus_1 = raw.c - 1.0 + 0.5 * raw.mass_tail;
    let c = 1.0 + c_minus_1;
    Ok(TiltMoments {
        c_minus_1,
        ln_c: c_minus_1.ln_1p(),
        mean: raw.s1 / c,
        second_moment: raw.s2 / c,
    })
}

/// Result of the moment-condition solve `m * E_{P_a}[N_1] = n`.
#[derive(Debug, Clone, Copy)]
pub struct TiltSolution {
    pub a_star: f64,
    /// `E_{P_{a*}}[N_1]` at the returned tilt.
    pub expected_count: f64,
    pub iterations: u32,
    /// Signed relative residual `(m * expected_count - n) / n`.
    pub residual: f64,
}

/// Solve the moment condition for integer total `n`.
pub fn solve_tilt(m: u64, n: u64) -> Result<TiltSolution> {
    solve_tilt_target(m, n as f64)
}

/// Solve `m * E_{P_a}[N_1] = target` for a real positive target total.
///
/// Bisection on the bracket `[max(ln(m/(target e)), floor), m/(2 target)]`,
/// widened until the moment function changes sign; the mean is strictly
/// decreasing in `a`, so the root is unique. Runs at most 200 iterations and
/// reports the achieved residual.
pub fn solve_tilt_target(m: u64, target: f64) -> Result<TiltSolution> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if !(target > 0.0) {
        return Err(Error::TiltUnbounded { m, target });
    }
    let mf = m as f64;
    let mu = target / mf;

    let mut hi = 0.5 / mu;
    if hi < TILT_FLOOR {
        return Err(Error::TiltFloorViolation {
            m,
            target,
            floor: TILT_FLOOR,
        });
    }
    // ln(m/(target*e)) lower-bounds the root when positive.
    let a0 = -(mu.ln()) - 1.0;
    let mut lo = a0.max(TILT_FLOOR);
    if lo >= hi {
        lo = TILT_FLOOR;
    }

    let g = |a: f64| -> Result<f64> { Ok(mf * tilt_moments(a)?.mean - target) };

    // Widen until the bracket straddles the root.
    let mut g_lo = g(lo)?;
    let mut widen = 0;
    while g_lo < 0.0 {
        if lo <= TILT_FLOOR {
            return Err(Error::TiltFloorViolation {
                m,
                target,
                floor: TILT_FLOOR,
            });
        }
        lo = (lo / 4.0).max(TILT_FLOOR);
        g_lo = g(lo)?;
        widen += 1;
        if widen > 64 {
            return Err(Error::TiltFloorViolation {
                m,
                target,
                floor: TILT_FLOOR,
            });
        }
    }
    let mut g_hi = g(hi)?;
    widen = 0;
    while g_hi > 0.0 {
        hi *= 4.0;
        g_hi = g(hi)?;
        widen += 1;
        if widen > 64 {
            return Err(Error::TiltUnbounded { m, target });
        }
    }

    let mut best = TiltSolution {
        a_star: hi,
        expected_count: (g_hi + target) / mf,
        iterations: 0,
        residual: g_hi / target,
    };
    for iter in 1..=200u32 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        let sol = TiltSolution {
            a_star: mid,
            expected_count: (g_mid + target) / mf,
            iterations: iter,
            residual: g_mid / target,
        };
        if sol.residual.abs() < best.residual.abs() {
            best = sol;
        }
        if g_mid.abs() <= 1e-10 * target {
            return Ok(sol);
        }
        if g_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(best)
}

/// Closed-form normalizer and moments through the tree function.
///
/// With `z = e^{-(1+a)}` and `T` the solution of `T e^{-T} = z` in `(0, 1)`,
/// the series `sum_{k>=1} k^k z^k / k!` equals `T/(1-T)`. Writing
/// `eps = 1 - T` (which is also `P_a(0)`):
///
/// ```text
/// C_a      = 1 / eps
/// E[N_1]   = (1 - eps) / eps^2
/// E[N_1^2] = (1 - eps)(3 - 2 eps) / eps^4
/// a        = -eps - ln(1 - eps)
/// ```
///
/// Everything here is O(1), which makes quadrature over tilts and dense grid
/// scans cheap. The summation route in [`TiltedStirling`] stays the source of
/// truth for tables; the two agree to ~1e-12 relative and are cross-checked
/// in the test suite.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormTilt {
    epsilon: f64,
}

impl ClosedFormTilt {
    /// Evaluate at a given tilt by Newton iteration on `-e - ln(1-e) = a`.
    pub fn at_tilt(a: f64) -> Result<Self> {
        if !(a > 0.0) || a.is_nan() {
            return Err(Error::NonPositiveTilt(a));
        }
        let h = |e: f64| -e - (-e).ln_1p();
        let mut e = if a < 0.75 {
            (2.0 * a).sqrt().min(0.95)
        } else {
            1.0 - (-(1.0 + a)).exp()
        };
        for _ in 0..64 {
            let diff = h(e) - a;
            if diff.abs() <= 4.0 * f64::EPSILON * a {
                break;
            }
            // h'(e) = e / (1 - e)
            let step = diff * (1.0 - e) / e;
            e -= step;
            if !(e > 0.0 && e < 1.0) {
                e = if e <= 0.0 { f64::MIN_POSITIVE.sqrt() } else { 1.0 - 1e-17 };
            }
        }
        Ok(ClosedFormTilt { epsilon: e })
    }

    /// Tilt whose distribution has the given mean; exact inversion of the
    /// moment condition: `eps = 2 / (1 + sqrt(1 + 4 mu))`.
    pub fn for_mean(mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::TiltUnbounded { m: 1, target: mu });
        }
        let s = (1.0 + 4.0 * mu).sqrt();
        Ok(ClosedFormTilt {
            epsilon: 2.0 / (1.0 + s),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tilt(&self) -> f64 {
        let e = self.epsilon;
        // 1 - eps computed stably: for eps = 2/(1+s), 1-eps = (s-1)/(s+1).
        -e - (-e).ln_1p()
    }

    pub fn normalizer(&self) -> f64 {
        1.0 / self.epsilon
    }

    pub fn ln_normalizer(&self) -> f64 {
        -self.epsilon.ln()
    }

    pub fn mean(&self) -> f64 {
        let e = self.epsilon;
        (1.0 - e) / (e * e)
    }

    pub fn second_moment(&self) -> f64 {
        let e = self.epsilon;
        (1.0 - e) * (3.0 - 2.0 * e) / (e * e * e * e)
    }

    pub fn variance(&self) -> f64 {
        let e = self.epsilon;
        (1.0 - e) * (2.0 - e) / (e * e * e * e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::LOG2_E;

    // Frozen with a 50-digit evaluation of the defining series.
    const LOG2_M10: f64 = -2.998_730_574_732_964_1;
    const C_1: f64 = 1.188_487_369_434_474_4;
    const E_HALF: f64 = 0.618_752_385_101_152_1;
    const E_1: f64 = 0.224_014_857_870_802_5;
    const E2_1: f64 = 0.416_786_798_785_735_28;

    #[test]
    fn stirling_ratio_small_values() {
        assert_eq!(log_stirling_ratio(0).bits(), 0.0);
        assert!((log_stirling_ratio(1).bits() + LOG2_E).abs() < 1e-13);
        assert!((log_stirling_ratio(10).bits() - LOG2_M10).abs() < 1e-12);
    }

    #[test]
    fn robbins_bracket_is_strict() {
        for k in 1..=10_000u64 {
            let kf = k as f64;
            let r = -0.5 * (LN_2PI + kf.ln()) - ln_stirling_ratio(k);
            assert!(r < 1.0 / (12.0 * kf), "upper violated at k={k}");
            assert!(r > 1.0 / (12.0 * kf + 1.0), "lower violated at k={k}");
        }
        for k in [100_000u64, 1_000_000] {
            let kf = k as f64;
            let r = -0.5 * (LN_2PI + kf.ln()) - ln_stirling_ratio(k);
            assert!(r < 1.0 / (12.0 * kf) && r > 1.0 / (12.0 * kf + 1.0));
        }
    }

    #[test]
    fn ln_factorial_matches_exact_products() {
        let mut acc = 0.0f64;
        for k in 1..=60u64 {
            acc += (k as f64).ln();
            assert!((ln_factorial(k) - acc).abs() < 1e-11 * acc.max(1.0));
        }
    }

    #[test]
    fn normalizer_at_unit_tilt() {
        let d = TiltedStirling::new(1.0).unwrap();
        assert!((d.normalizer() - C_1).abs() < 1e-9);
        assert!((d.pmf(0) - 1.0 / C_1).abs() < 1e-9);
    }

    #[test]
    fn normalizer_large_tilt_sandwich() {
        // At a = 20 the sandwich gap is ~1e-18 of C-1, so compare in the
        // C-1 domain where full relative precision survives.
        let d = TiltedStirling::new(20.0).unwrap();
        let lo = (-21.0f64).exp();
        let hi = lo + 0.25 / std::f64::consts::PI.sqrt() * (-40.0f64).exp()
            / -(-20.0f64).exp_m1();
        assert!(d.normalizer_minus_1() > lo);
        assert!(d.normalizer_minus_1() + d.normalizer_tail_bound() < hi);

        let d50 = TiltedStirling::new(50.0).unwrap();
        assert!(d50.normalizer_minus_1() < 2.0 * (-50.0f64).exp());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TiltedStirling::new(0.0).is_err());
        assert!(TiltedStirling::new(-1.0).is_err());
        assert!(TiltedStirling::new(9e-9).is_err());
        assert!(TiltedStirling::with_tolerance(1.0, 0.0).is_err());
        assert!(TiltedStirling::with_tolerance(1.0, 1e-8).is_err());
        assert!(TiltedStirling::with_tolerance(1.0, 1e-10).is_ok());
    }

    #[test]
    fn pmf_consecutive_ratio_identity() {
        // pmf(k+1)/pmf(k) = ((k+1)^{k+1}/k^k) e^{-(1+a)} / (k+1)
        let a = 0.7f64;
        let d = TiltedStirling::new(a).unwrap();
        for k in 0..40u64 {
            let got = d.pmf(k + 1) / d.pmf(k);
            let kf = k as f64;
            let expect = if k == 0 {
                (-(1.0 + a)).exp()
            } else {
                (kf * ((kf + 1.0) / kf).ln() - (1.0 + a)).exp()
            };
            assert!(
                (got / expect - 1.0).abs() < 1e-11,
                "ratio mismatch at k={k}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn pmf_sums_to_one_with_tail() {
        for a in [0.05, 0.5, 1.0, 3.0] {
            let d = TiltedStirling::new(a).unwrap();
            let total = d.cum().last().unwrap() + d.tail_mass();
            assert!((total - 1.0).abs() < 1e-12, "a={a}: total={total}");
            assert!(d.tail_mass() < 1e-11);
            // cum nondecreasing
            assert!(d.cum().windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn expected_count_values() {
        let d = TiltedStirling::new(0.5).unwrap();
        assert!((d.expected_count() - E_HALF).abs() < 1e-10);

        let d1 = TiltedStirling::new(1.0).unwrap();
        assert!(d1.expected_count() >= (-2.0f64).exp());
        assert!(d1.expected_count() <= 0.5);
        assert!((d1.expected_count() - E_1).abs() < 1e-10);

        let d10 = TiltedStirling::new(10.0).unwrap();
        assert!(d10.expected_count() >= (-11.0f64).exp());
        assert!(d10.expected_count() <= 0.05);
    }

    #[test]
    fn second_moment_values() {
        let d = TiltedStirling::new(1.0).unwrap();
        assert!((d.second_moment() - E2_1).abs() < 1e-10);
        for a in [0.1, 0.9, 4.0] {
            let d = TiltedStirling::new(a).unwrap();
            let m = d.expected_count();
            assert!(d.second_moment() >= m * m);
            // curvature bound from the mixture analysis
            let c = d.normalizer();
            assert!(d.second_moment() < 3.5 * c * c * c * c);
        }
    }

    #[test]
    fn solve_tilt_brackets() {
        let s = solve_tilt(7, 7).unwrap();
        assert!(s.a_star <= 0.5);
        assert!(s.residual.abs() <= 1e-10);

        let s = solve_tilt(100, 10).unwrap();
        assert!(s.a_star >= (10.0f64 / std::f64::consts::E).ln());
        assert!((100.0 * s.expected_count - 10.0).abs() <= 10.0 * 1e-10);
    }

    #[test]
    fn solve_tilt_matches_grid_scan() {
        // dense sign-change scan of m*E(a) - n on the closed form
        let (m, n) = (2u64, 20u64);
        let s = solve_tilt(m, n).unwrap();
        let mut prev_a = 1e-6;
        let mut root = None;
        for i in 1..400_000 {
            let a = 1e-6 + i as f64 * 2.5e-6;
            let e = ClosedFormTilt::at_tilt(a).unwrap().mean();
            if (m as f64) * e - (n as f64) < 0.0 {
                root = Some(0.5 * (prev_a + a));
                break;
            }
            prev_a = a;
        }
        let root = root.expect("scan found no sign change");
        assert!(
            (s.a_star - root).abs() < 1e-5,
            "solver {} vs scan {}",
            s.a_star,
            root
        );
        // tighter: residual at solver root
        assert!(s.residual.abs() < 1e-10);
    }

    #[test]
    fn solve_tilt_floor_violation() {
        match solve_tilt(1, 1_000_000_000) {
            Err(Error::TiltFloorViolation { .. }) => {}
            other => panic!("expected floor violation, got {other:?}"),
        }
        assert!(matches!(solve_tilt(3, 0), Err(Error::TiltUnbounded { .. })));
    }

    #[test]
    fn closed_form_agrees_with_summation() {
        let mut a = 1e-4;
        while a < 50.0 {
            let d = TiltedStirling::new(a).unwrap();
            let cf = ClosedFormTilt::at_tilt(a).unwrap();
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
            assert!(
                rel(cf.normalizer(), d.normalizer()) < 1e-11,
                "C mismatch at a={a}"
            );
            assert!(
                rel(cf.mean(), d.expected_count()) < 1e-10,
                "mean mismatch at a={a}: {} vs {}",
                cf.mean(),
                d.expected_count()
            );
            assert!(
                rel(cf.second_moment(), d.second_moment()) < 1e-10,
                "m2 mismatch at a={a}"
            );
            a *= 2.7;
        }
    }

    #[test]
    fn closed_form_mean_inversion() {
        for mu in [1e-6, 0.01, 1.0, 57.0, 1e9] {
            let cf = ClosedFormTilt::for_mean(mu).unwrap();
            assert!((cf.mean() / mu - 1.0).abs() < 1e-12);
            let back = ClosedFormTilt::at_tilt(cf.tilt()).unwrap();
            assert!((back.mean() / mu - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn expected_count_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        let mut a = 1e-4;
        while a <= 20.0 {
            let mean = tilt_moments(a).unwrap().mean;
            assert!(mean < prev, "mean not decreasing at a={a}");
            prev = mean;
            a *= 1.35;
        }
    }
}

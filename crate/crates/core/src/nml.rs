//! Exact Shtarkov normalizers on small instances.
//!
//! Everything here is ground truth: the Poisson-side normalizer
//! `M(S_{m,n}) = sum over count vectors with total n of prod_j M(N_j)` and
//! the multinomial Shtarkov sum are computed by log-domain dynamic
//! programming (convolution symbol by symbol), with full enumeration kept as
//! a test oracle. The number of compositions `C(n+m-1, m-1)` explodes, so the
//! DP is the shippable path and instances above the size cap are hard errors.

use crate::bits::{ln_sum_exp, LogWeight};
use crate::error::{Error, Result};
use crate::stirling::{ln_factorial, ln_stirling_ratio, solve_tilt, TiltedStirling};

pub const MAX_M: u64 = 50;
pub const MAX_N: u64 = 500;

fn check_caps(m: u64, n: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if m > MAX_M || n > MAX_N {
        return Err(Error::InstanceTooLarge {
            m,
            n,
            max_m: MAX_M,
            max_n: MAX_N,
        });
    }
    Ok(())
}

/// Visit every count vector over `m` symbols with total `n`.
pub fn for_each_count_vector<F: FnMut(&[u64])>(m: u64, n: u64, mut f: F) {
    let mut buf = vec![0u64; m as usize];
    fn recurse<F: FnMut(&[u64])>(buf: &mut [u64], idx: usize, rest: u64, f: &mut F) {
        if idx + 1 == buf.len() {
            buf[idx] = rest;
            f(buf);
            return;
        }
        for v in 0..=rest {
            buf[idx] = v;
            recurse(buf, idx + 1, rest - v, f);
        }
    }
    recurse(&mut buf, 0, n, &mut f);
}

/// Log-domain DP: starting from per-count weights `w[k]` (nats), convolve m
/// times and return ln of the total weight on the slice `sum counts = n`.
fn dp_slice_sum(m: u64, n: u64, w: &[f64]) -> f64 {
    let n = n as usize;
    let mut dp = w[..=n].to_vec();
    let mut next = vec![0.0f64; n + 1];
    let mut scratch: Vec<f64> = Vec::with_capacity(n + 1);
    for _ in 1..m {
        for (t, slot) in next.iter_mut().enumerate() {
            scratch.clear();
            for s in 0..=t {
                scratch.push(dp[t - s] + w[s]);
            }
            *slot = ln_sum_exp(&scratch);
        }
        std::mem::swap(&mut dp, &mut next);
    }
    dp[n]
}

/// `log2 M(S_{m,n})`: the Poisson-side maximized-likelihood mass of the slice.
pub fn poisson_nml_normalizer(m: u64, n: u64) -> Result<LogWeight> {
    check_caps(m, n)?;
    let w: Vec<f64> = (0..=n).map(ln_stirling_ratio).collect();
    Ok(LogWeight::from_ln(dp_slice_sum(m, n, &w)))
}

/// `log2 C(S_{m,n})`: the multinomial Shtarkov sum
/// `sum n!/(prod N_j!) prod (N_j/n)^{N_j}`.
pub fn multinomial_shtarkov(m: u64, n: u64) -> Result<LogWeight> {
    check_caps(m, n)?;
    if n == 0 {
        return Ok(LogWeight::from_ln(0.0));
    }
    // per-symbol weight k^k / k!, assembled with the n!/n^n prefactor
    let w: Vec<f64> = (0..=n)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                let kf = k as f64;
                kf * kf.ln() - ln_factorial(k)
            }
        })
        .collect();
    let nf = n as f64;
    let ln_total = ln_factorial(n) - nf * nf.ln() + dp_slice_sum(m, n, &w);
    Ok(LogWeight::from_ln(ln_total))
}

/// Both normalizers for one instance, with the factorization
/// `C(S_{m,n}) = M(S_{m,n}) / M(n)` available as a cross-check.
#[derive(Debug, Clone, Copy)]
pub struct ShtarkovTable {
    pub m: u64,
    pub n: u64,
    pub log_m_slice: LogWeight,
    pub log_multinomial: LogWeight,
}

impl ShtarkovTable {
    pub fn compute(m: u64, n: u64) -> Result<Self> {
        Ok(ShtarkovTable {
            m,
            n,
            log_m_slice: poisson_nml_normalizer(m, n)?,
            log_multinomial: multinomial_shtarkov(m, n)?,
        })
    }
}

/// Max-abs difference between the tilted conditional `Q_a(.|N=n)` and the
/// multinomial NML distribution over the slice. The tilt cancels on the
/// slice, so the result stays at rounding level for every `a`.
pub fn conditional_tilted_equals_nml(m: u64, n: u64, a: f64) -> Result<f64> {
    check_caps(m, n)?;
    let d = TiltedStirling::new(a)?;
    let nf = n as f64;

    let mut tilted: Vec<f64> = Vec::new();
    let mut nml: Vec<f64> = Vec::new();
    for_each_count_vector(m, n, |counts| {
        let lt: f64 = counts.iter().map(|&k| d.ln_pmf(k)).sum();
        tilted.push(lt);
        let lm: f64 = ln_factorial(n)
            + counts
                .iter()
                .map(|&k| {
                    let term = if k == 0 {
                        0.0
                    } else {
                        let kf = k as f64;
                        kf * (kf / nf).ln()
                    };
                    term - ln_factorial(k)
                })
                .sum::<f64>();
        nml.push(lm);
    });
    let zt = ln_sum_exp(&tilted);
    let zm = ln_sum_exp(&nml);
    let max_diff = tilted
        .iter()
        .zip(&nml)
        .map(|(&lt, &lm)| ((lt - zt).exp() - (lm - zm).exp()).abs())
        .fold(0.0f64, f64::max);
    Ok(max_diff)
}

/// The minimax-gap identity on a slice: the exact-NML regret equals the
/// tilted regret plus `log2 Q_{a*}(S_{m,n})`, and the gap is positive.
#[derive(Debug, Clone, Copy)]
pub struct GapIdentity {
    /// `log2 M(S_{m,n})` (the exact minimax regret on the slice).
    pub lhs: f64,
    /// `R(Q_{a*}) + log2 Q_{a*}(S_{m,n})`.
    pub rhs: f64,
    /// `-log2 Q_{a*}(S_{m,n})`, the price of not conditioning.
    pub gap: f64,
}

pub fn minimax_gap_identity(m: u64, n: u64) -> Result<GapIdentity> {
    check_caps(m, n)?;
    if n == 0 {
        return Err(Error::InstanceTooLarge {
            m,
            n,
            max_m: MAX_M,
            max_n: MAX_N,
        });
    }
    let sol = solve_tilt(m, n)?;
    let d = TiltedStirling::new(sol.a_star)?;

    let mut lhs_terms: Vec<f64> = Vec::new();
    let mut slice_terms: Vec<f64> = Vec::new();
    for_each_count_vector(m, n, |counts| {
        let lm: f64 = counts.iter().map(|&k| ln_stirling_ratio(k)).sum();
        lhs_terms.push(lm);
        slice_terms.push(counts.iter().map(|&k| d.ln_pmf(k)).sum());
    });
    let lhs = LogWeight::from_ln(ln_sum_exp(&lhs_terms)).bits();
    let log_q_slice = LogWeight::from_ln(ln_sum_exp(&slice_terms)).bits();
    let regret =
        sol.a_star * n as f64 * crate::bits::LOG2_E + m as f64 * d.log_normalizer().bits();
    Ok(GapIdentity {
        lhs,
        rhs: regret + log_q_slice,
        gap: -log_q_slice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::LOG2_E;

    #[test]
    fn two_by_two_values() {
        // compositions (2,0),(1,1),(0,2): M-side total 5 e^{-2}
        let p = poisson_nml_normalizer(2, 2).unwrap();
        let expect = (5.0f64.ln() - 2.0) * LOG2_E;
        assert!((p.bits() - expect).abs() < 1e-10);

        let c = multinomial_shtarkov(2, 2).unwrap();
        assert!((c.bits() - 2.5f64.log2()).abs() < 1e-10);

        let c1 = multinomial_shtarkov(2, 1).unwrap();
        assert!((c1.bits() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_symbol_is_stirling_ratio() {
        for n in [0u64, 1, 5, 40] {
            let p = poisson_nml_normalizer(1, n).unwrap();
            assert!((p.bits() - ln_stirling_ratio(n) * LOG2_E).abs() < 1e-12);
        }
    }

    #[test]
    fn dp_matches_enumeration() {
        for m in 1..=4u64 {
            for n in 0..=10u64 {
                let dp = poisson_nml_normalizer(m, n).unwrap().ln();
                let mut terms = Vec::new();
                for_each_count_vector(m, n, |counts| {
                    terms.push(counts.iter().map(|&k| ln_stirling_ratio(k)).sum());
                });
                let direct = ln_sum_exp(&terms);
                assert!(
                    (dp - direct).abs() < 1e-12 * direct.abs().max(1.0),
                    "m={m} n={n}: {dp} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn factorization_identity() {
        for (m, n) in [(2u64, 3u64), (3, 5), (4, 8), (5, 12), (10, 20)] {
            let t = ShtarkovTable::compute(m, n).unwrap();
            let expect = t.log_m_slice.bits() - ln_stirling_ratio(n) * LOG2_E;
            assert!(
                (t.log_multinomial.bits() - expect).abs() < 1e-10,
                "factorization fails at m={m} n={n}"
            );
        }
    }

    #[test]
    fn conditional_tilt_invariance() {
        assert!(conditional_tilted_equals_nml(2, 3, 0.7).unwrap() < 1e-12);
        for a in [0.1, 1.0, 5.0] {
            assert!(conditional_tilted_equals_nml(2, 3, a).unwrap() < 1e-12);
            assert!(conditional_tilted_equals_nml(3, 4, a).unwrap() < 1e-12);
        }
        // single symbol: the conditional is a point mass either way
        assert!(conditional_tilted_equals_nml(1, 5, 2.0).unwrap() < 1e-15);
    }

    #[test]
    fn gap_identity_holds() {
        let g = minimax_gap_identity(2, 2).unwrap();
        assert!((g.lhs - g.rhs).abs() < 1e-10);
        assert!(g.gap > 0.0);

        let g = minimax_gap_identity(4, 8).unwrap();
        assert!((g.lhs - g.rhs).abs() < 1e-10);
        assert!(g.gap > 0.0);
        assert!(g.gap < 0.5 * (2.0 * std::f64::consts::PI * 8.0).log2() + 2.0);

        // m=1: single composition, identity collapses to 0 = 0
        let g = minimax_gap_identity(1, 5).unwrap();
        assert!((g.lhs - g.rhs).abs() < 1e-10);
        assert!(g.gap > 0.0);
    }

    #[test]
    fn size_caps_are_hard_errors() {
        assert!(matches!(
            poisson_nml_normalizer(51, 5),
            Err(Error::InstanceTooLarge { .. })
        ));
        assert!(matches!(
            multinomial_shtarkov(5, 501),
            Err(Error::InstanceTooLarge { .. })
        ));
        assert!(poisson_nml_normalizer(0, 5).is_err());
    }
}

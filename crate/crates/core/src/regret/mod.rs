//! Regret and redundancy accounting for tilted-product codes.
//!
//! The central identity is exact, not asymptotic: coding a count vector with
//! the product `Q_a = P_a^m` instead of the per-count maximized Poisson
//! likelihood `M` costs
//!
//! ```text
//! R(Q_a, N) = a N log2(e) + m log2(C_a)   bits,
//! ```
//!
//! which depends on the data only through the total `N`. The optimal tilt for
//! a known total solves the moment condition `m E[N_1] = n`. Around that
//! exact accounting this module layers: the two asymptotic regimes with their
//! remainder bands, the two-tilt code for partitioned alphabets, envelope
//! classes, the tilt mixture for unknown totals, the redundancy expansion,
//! and the information-projection (Pythagorean) identity.

mod envelope;
mod mixture;
mod redundancy;
mod sweep;

pub use envelope::{envelope_regret_upper, envelope_tilted_pmf, EnvelopeSpec, EnvelopeTilted};
pub use mixture::{mixture_pmf, QuadratureSpec};
pub use redundancy::{redundancy_main_term, redundancy_main_term_uniform, RedundancyBand};
pub use sweep::{sweep_partition_curve, SweepCurve, SweepRow};

use crate::bits::{ln_sum_exp, LogWeight, LOG2_E};
use crate::counts::CountVector;
use crate::error::{Error, Result};
use crate::nml::for_each_count_vector;
use crate::stirling::{
    ln_stirling_ratio, solve_tilt, solve_tilt_target, tilt_moments, TiltSolution, TiltedStirling,
};

/// Which asymptotic regime a report's band comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `m = o(n)`: main term `(m/2) log2(ne/m)`.
    SmallAlphabet,
    /// `n = o(m)`: main term `n log2(m/(ne))`.
    LargeAlphabet,
    /// `n ~ b m`: the regret is exactly linear in `m`, no band needed.
    Linear,
    /// Two-tilt partitioned code (band from the partition remainder terms).
    Partitioned,
}

/// Regret value with its analytic main-term/remainder decomposition.
///
/// Whenever the regime's premises hold, `main + remainder_lo <= regret <=
/// main + remainder_hi`. Remainders are set to infinities when a band's
/// defining quantity is undefined for the instance.
#[derive(Debug, Clone, Copy)]
pub struct RegretReport {
    pub regret_bits: f64,
    pub main_term_bits: f64,
    pub remainder_lo_bits: f64,
    pub remainder_hi_bits: f64,
    pub regime: Regime,
    pub tilt: TiltSolution,
}

/// Exact regret of coding `counts` with the product of `P_a`'s:
/// `a N log2 e + m log2 C_a`.
pub fn regret_fixed_tilt(counts: &CountVector, a: f64) -> Result<f64> {
    let mom = tilt_moments(a)?;
    Ok(a * counts.total() as f64 * LOG2_E + counts.m() as f64 * mom.ln_c * LOG2_E)
}

/// Same value computed the long way, as a log pmf ratio; kept public so the
/// exactness of the closed form stays testable against it.
pub fn regret_direct_ratio(counts: &CountVector, a: f64) -> Result<f64> {
    let d = TiltedStirling::new(a)?;
    let mut bits = 0.0;
    for &k in counts.counts() {
        bits += (ln_stirling_ratio(k) - d.ln_pmf(k)) * LOG2_E;
    }
    Ok(bits)
}

fn small_alphabet_d1(a_tilde: f64) -> f64 {
    // concrete pre-Taylor lower bound for a*: a* >= ã / ((1+sqrt(2ã)) e^{r_ã} + 4ã/(3 sqrt pi))
    let cbrt = a_tilde.cbrt();
    if cbrt >= 1.0 {
        return f64::INFINITY;
    }
    let r = cbrt / (12.0 * (1.0 - cbrt));
    let denom = (1.0 + (2.0 * a_tilde).sqrt()) * r.exp()
        + 4.0 / (3.0 * std::f64::consts::PI.sqrt()) * a_tilde;
    1.0 - 1.0 / denom
}

fn large_alphabet_d2(x: f64) -> f64 {
    // x = tail-to-slots ratio; valid bound for any x in (0, 1)
    3.0 * x + 13.5 * x * x / (1.0 - x)
}

fn large_alphabet_d3(m_eff: f64, tail: f64) -> Result<f64> {
    let ne = tail * std::f64::consts::E;
    if m_eff - ne <= 0.0 {
        return Err(Error::BandUndefined { m_eff, ne });
    }
    Ok(0.5 / std::f64::consts::PI.sqrt() * ne * ne / (m_eff * (m_eff - ne)))
}

/// Optimal-tilt regret `R_{m,n}` with the regime band.
///
/// Regime policy: small-alphabet when `m/n <= 0.1`, large-alphabet when
/// `n e / m <= 0.1`, linear otherwise (where the regret is exactly
/// `c m` with `c = a* b log e + log C_{a*}`, so the main term is the regret
/// itself).
pub fn regret_optimal(m: u64, n: u64) -> Result<RegretReport> {
    let sol = solve_tilt(m, n)?;
    let mom = tilt_moments(sol.a_star)?;
    let (mf, nf) = (m as f64, n as f64);
    let regret = sol.a_star * nf * LOG2_E + mf * mom.ln_c * LOG2_E;

    let report = if mf / nf <= 0.1 {
        let a_tilde = mf / (2.0 * nf);
        let d1 = small_alphabet_d1(a_tilde);
        RegretReport {
            regret_bits: regret,
            main_term_bits: 0.5 * mf * (nf * std::f64::consts::E / mf).log2(),
            remainder_lo_bits: if d1.is_finite() {
                -d1 * 0.5 * mf * LOG2_E
            } else {
                f64::NEG_INFINITY
            },
            remainder_hi_bits: mf * (mf / nf).sqrt().ln_1p() * LOG2_E,
            regime: Regime::SmallAlphabet,
            tilt: sol,
        }
    } else if nf * std::f64::consts::E / mf <= 0.1 {
        if mf - nf * std::f64::consts::E <= 0.0 {
            return Err(Error::LargeAlphabetBandUndefined { m, n });
        }
        let x = nf / mf;
        let d2 = large_alphabet_d2(x);
        let d3 = large_alphabet_d3(mf, nf)?;
        RegretReport {
            regret_bits: regret,
            main_term_bits: nf * (mf / (nf * std::f64::consts::E)).log2(),
            remainder_lo_bits: mf * ((1.0 - d2) * x).ln_1p() * LOG2_E,
            remainder_hi_bits: mf * (x + d3).ln_1p() * LOG2_E,
            regime: Regime::LargeAlphabet,
            tilt: sol,
        }
    } else {
        RegretReport {
            regret_bits: regret,
            main_term_bits: regret,
            remainder_lo_bits: 0.0,
            remainder_hi_bits: 0.0,
            regime: Regime::Linear,
            tilt: sol,
        }
    };
    Ok(report)
}

/// Multinomial (fixed-`n`) regret upper bound: the Poisson-side optimum plus
/// the `1/2 log2(2 pi n)` cost of also describing the total.
pub fn multinomial_regret_upper(m: u64, n: u64) -> Result<f64> {
    let r = regret_optimal(m, n)?;
    Ok(r.regret_bits + 0.5 * (2.0 * std::f64::consts::PI * n as f64).log2())
}

/// A head/tail split of the alphabet: `level` symbols are "frequent", and the
/// remaining `m - level` carry the fraction `tail_fraction` of the total.
#[derive(Debug, Clone, Copy)]
pub struct PartitionSpec {
    pub level: u64,
    pub tail_fraction: f64,
}

/// One side of a two-tilt code.
#[derive(Debug, Clone, Copy)]
pub struct PartRegret {
    pub symbols: u64,
    pub total: f64,
    pub tilt: TiltSolution,
    pub regret_bits: f64,
}

#[derive(Debug, Clone)]
pub struct TwoTiltRegret {
    pub report: RegretReport,
    pub head: Option<PartRegret>,
    pub tail: Option<PartRegret>,
}

fn part_regret(symbols: u64, total: f64) -> Result<PartRegret> {
    let sol = solve_tilt_target(symbols, total)?;
    let mom = tilt_moments(sol.a_star)?;
    Ok(PartRegret {
        symbols,
        total,
        tilt: sol,
        regret_bits: sol.a_star * total * LOG2_E + symbols as f64 * mom.ln_c * LOG2_E,
    })
}

/// Two-tilt regret on the set of count vectors with total `n` and tail sum
/// `n * f`: the problem splits into two independent one-tilt codes, one on
/// the `L` head symbols with total `n - nf`, one on the `m - L` tail symbols
/// with total `nf`, and the regrets add exactly.
pub fn two_tilt_regret(m: u64, n: u64, spec: &PartitionSpec) -> Result<TwoTiltRegret> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let level = spec.level;
    if level > m {
        return Err(Error::BadPartitionLevel { level, m });
    }
    let f = spec.tail_fraction;
    if !(0.0..=1.0).contains(&f) || f.is_nan() {
        return Err(Error::BadTailFraction(f));
    }
    let nf = n as f64 * f;
    let head_total = n as f64 - nf;
    if level == 0 && nf < n as f64 {
        return Err(Error::DegeneratePartition { level, tail: nf });
    }
    if level == m && nf > 0.0 {
        return Err(Error::DegeneratePartition { level, tail: nf });
    }

    let head = if level > 0 {
        Some(part_regret(level, head_total)?)
    } else {
        None
    };
    let tail = if level < m {
        Some(part_regret(m - level, nf)?)
    } else {
        None
    };

    let regret =
        head.map_or(0.0, |p| p.regret_bits) + tail.as_ref().map_or(0.0, |p| p.regret_bits);

    // main term (L/2) log2((n - nf) e / L) + nf log2((m - L)/(nf e))
    let lf = level as f64;
    let rest = (m - level) as f64;
    let mut main = 0.0;
    if level > 0 {
        main += 0.5 * lf * (head_total * std::f64::consts::E / lf).log2();
    }
    if nf > 0.0 {
        main += nf * (rest / (nf * std::f64::consts::E)).log2();
    }

    // remainder band r1/r2: head contributes the small-alphabet terms,
    // tail the large-alphabet ones
    let mut lo = 0.0;
    let mut hi = 0.0;
    if level > 0 {
        let d1 = small_alphabet_d1(lf / (2.0 * head_total));
        lo += if d1.is_finite() {
            -d1 * 0.5 * lf * LOG2_E
        } else {
            f64::NEG_INFINITY
        };
        hi += lf * (lf / head_total).sqrt().ln_1p() * LOG2_E;
    }
    if level < m && nf > 0.0 {
        let x = nf / rest;
        lo += rest * ((1.0 - large_alphabet_d2(x)) * x).ln_1p() * LOG2_E;
        hi += match large_alphabet_d3(rest, nf) {
            Ok(d3) => rest * (x + d3).ln_1p() * LOG2_E,
            Err(_) => f64::INFINITY,
        };
    }

    // synthesize a combined tilt record for the report (head side if present)
    let tilt = head.map(|p| p.tilt).or(tail.map(|p| p.tilt)).unwrap();
    Ok(TwoTiltRegret {
        report: RegretReport {
            regret_bits: regret,
            main_term_bits: main,
            remainder_lo_bits: lo,
            remainder_hi_bits: hi,
            regime: Regime::Partitioned,
            tilt,
        },
        head,
        tail,
    })
}

/// The three divergences of the information-projection identity
/// `D(M_cond || M) = D(M_cond || Q_a) + D(Q_a || M)` at the moment-matched
/// tilt, all in bits.
#[derive(Debug, Clone, Copy)]
pub struct PythagoreanCheck {
    /// `D(M_cond || M) = -log2 M(S_{m,n})`.
    pub cond_to_base: f64,
    /// `D(M_cond || Q_a)`, by enumeration over the slice.
    pub cond_to_tilt: f64,
    /// `D(Q_a || M) = -(a n log2 e + m log2 C_a)` at the matched tilt.
    pub tilt_to_base: f64,
}

pub const PYTHAGOREAN_MAX_M: u64 = 6;
pub const PYTHAGOREAN_MAX_N: u64 = 12;

pub fn pythagorean_identity_check(m: u64, n: u64, a_star: f64) -> Result<PythagoreanCheck> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if m > PYTHAGOREAN_MAX_M || n > PYTHAGOREAN_MAX_N {
        return Err(Error::InstanceTooLarge {
            m,
            n,
            max_m: PYTHAGOREAN_MAX_M,
            max_n: PYTHAGOREAN_MAX_N,
        });
    }
    let d = TiltedStirling::new(a_star)?;
    let mut ln_m_terms = Vec::new();
    let mut ln_q_terms = Vec::new();
    for_each_count_vector(m, n, |counts| {
        ln_m_terms.push(counts.iter().map(|&k| ln_stirling_ratio(k)).sum::<f64>());
        ln_q_terms.push(counts.iter().map(|&k| d.ln_pmf(k)).sum::<f64>());
    });
    let ln_m_slice = ln_sum_exp(&ln_m_terms);
    let cond_to_base = -LogWeight::from_ln(ln_m_slice).bits();

    // D(M_cond || Q_a) = sum over the slice of M_cond * log2(M_cond / Q_a)
    let mut acc = 0.0;
    for (&lm, &lq) in ln_m_terms.iter().zip(&ln_q_terms) {
        let p = (lm - ln_m_slice).exp();
        if p > 0.0 {
            acc += p * (lm - ln_m_slice - lq) * LOG2_E;
        }
    }

    let regret = a_star * n as f64 * LOG2_E + m as f64 * d.log_normalizer().bits();
    Ok(PythagoreanCheck {
        cond_to_base,
        cond_to_tilt: acc,
        tilt_to_base: -regret,
    })
}

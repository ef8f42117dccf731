//! Envelope classes: symbol probabilities dominated by a nonincreasing
//! function `f(j)`, and the capped-MLE tilted code for them.

use crate::bits::LOG2_E;
use crate::error::{Error, Result};
use crate::stirling::{ln_factorial, ln_stirling_ratio, TILT_FLOOR};

/// A nonincreasing per-rank envelope `f(1), ..., f(m)` with cached tail sums
/// `F̄(L) = sum_{j>L} f(j)`. The envelope need not be a distribution:
/// `F̄(0)` may exceed 1.
#[derive(Debug, Clone)]
pub struct EnvelopeSpec {
    values: Vec<f64>,
    tail_sums: Vec<f64>,
}

impl EnvelopeSpec {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (i, w) in values.windows(2).enumerate() {
            if !(w[1] <= w[0]) || w[1] < 0.0 {
                return Err(Error::EnvelopeNotMonotone { rank: i + 1 });
            }
        }
        if values[0] < 0.0 || values.iter().any(|v| v.is_nan()) {
            return Err(Error::EnvelopeNotMonotone { rank: 0 });
        }
        // tail_sums[l] = sum_{j > l}, summed back-to-front for accuracy
        let mut tail_sums = vec![0.0; values.len() + 1];
        for j in (0..values.len()).rev() {
            tail_sums[j] = tail_sums[j + 1] + values[j];
        }
        Ok(EnvelopeSpec { values, tail_sums })
    }

    /// `f(j) = c j^{-alpha}` on ranks `1..=m`.
    pub fn power_law(m: u64, c: f64, alpha: f64) -> Result<Self> {
        let values = (1..=m).map(|j| c * (j as f64).powf(-alpha)).collect();
        Self::new(values)
    }

    pub fn m(&self) -> u64 {
        self.values.len() as u64
    }

    /// `f(j)`, 1-based rank.
    pub fn value(&self, j: u64) -> f64 {
        self.values[(j - 1) as usize]
    }

    /// `F̄(L) = sum_{j > L} f(j)` for `L` in `0..=m`.
    pub fn tail_sum(&self, level: u64) -> f64 {
        self.tail_sums[level as usize]
    }
}

/// The capped-MLE tilted pmf for one symbol with envelope cap `cap = n f(j)`:
///
/// ```text
/// P(k) = M(k) e^{-ak} / C            for k <= cap
/// P(k) = cap^k e^{-cap}/k! e^{-ak}/C for k >  cap
/// ```
///
/// so the numerator is exactly `max_{lambda <= cap} Poisson(lambda)(k)`.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeTilted {
    a: f64,
    cap: f64,
    normalizer: f64,
}

impl EnvelopeTilted {
    pub fn new(a: f64, cap: f64) -> Result<Self> {
        if !(a > 0.0) || a.is_nan() {
            return Err(Error::NonPositiveTilt(a));
        }
        if a < TILT_FLOOR {
            return Err(Error::TiltBelowFloor { a, floor: TILT_FLOOR });
        }
        if !(cap >= 0.0) {
            return Err(Error::BadTailFraction(cap));
        }
        let k_cap = cap.floor() as u64;

        // head: Stirling-ratio terms; M(k)e^{-ak} is decreasing, so once a
        // term falls below 1e-17 * head * (1 - e^{-a}) the omitted remainder
        // of the head is below 1e-17 * head by the geometric bound
        let mut head = 0.0f64;
        let mut k = 0u64;
        while k <= k_cap {
            let t = (ln_stirling_ratio(k) - a * k as f64).exp();
            head += t;
            if k >= 1 && t < 1e-17 * head * -(-a).exp_m1() {
                break;
            }
            k += 1;
        }

        // tail: tilted Poisson(cap) terms from k_cap + 1 on; the term ratio is
        // cap e^{-a} / (k+1) < 1 once k + 1 > cap, so a geometric bound closes
        // the sum
        let mut tail = 0.0f64;
        if cap > 0.0 {
            let ln_cap = cap.ln();
            let mut k = k_cap + 1;
            loop {
                let t = (k as f64 * ln_cap - cap - ln_factorial(k) - a * k as f64).exp();
                tail += t;
                let ratio = cap * (-a).exp() / (k as f64 + 1.0);
                if ratio < 1.0 && t * ratio / (1.0 - ratio) < 1e-16 * (head + tail) {
                    break;
                }
                k += 1;
            }
        }

        Ok(EnvelopeTilted {
            a,
            cap,
            normalizer: head + tail,
        })
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    /// nats
    pub fn ln_pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        let ln_num = if kf <= self.cap {
            ln_stirling_ratio(k)
        } else if self.cap == 0.0 {
            f64::NEG_INFINITY
        } else {
            kf * self.cap.ln() - self.cap - ln_factorial(k)
        };
        ln_num - self.a * kf - self.normalizer.ln()
    }

    /// ln of the capped maximized likelihood `max_{lambda <= cap} P_lambda(k)`.
    pub fn ln_capped_mle(&self, k: u64) -> f64 {
        let kf = k as f64;
        if kf <= self.cap {
            ln_stirling_ratio(k)
        } else if self.cap == 0.0 {
            f64::NEG_INFINITY
        } else {
            kf * self.cap.ln() - self.cap - ln_factorial(k)
        }
    }
}

/// Free-function form matching the capped pmf directly.
pub fn envelope_tilted_pmf(a: f64, cap: f64, k: u64) -> Result<f64> {
    Ok(EnvelopeTilted::new(a, cap)?.pmf(k))
}

/// The envelope-class regret upper bound
///
/// ```text
/// min_L  (L/2) log2(n(1-F̄(L))/L) + n F̄(L) log2 e + r3,
/// r3 = L/(2(1-F̄(L))) log2 e + L log2(1 + sqrt(L/(n(1-F̄(L)))))
/// ```
///
/// evaluated with the tilt `a = L/(2n(1-F̄(L)))` behind it. Levels where
/// `1 - F̄(L) <= 0` are skipped. Returns the bound and the minimizing level.
pub fn envelope_regret_upper(env: &EnvelopeSpec, n: u64) -> Result<(f64, u64)> {
    if n == 0 {
        return Err(Error::EnvelopeDegenerate);
    }
    let nf = n as f64;
    let mut best: Option<(f64, u64)> = None;
    for level in 1..=env.m() {
        let fbar = env.tail_sum(level);
        let head = 1.0 - fbar;
        if head <= 0.0 {
            continue;
        }
        let lf = level as f64;
        let bound = 0.5 * lf * (nf * head / lf).log2()
            + nf * fbar * LOG2_E
            + lf / (2.0 * head) * LOG2_E
            + lf * (lf / (nf * head)).sqrt().ln_1p() * LOG2_E;
        if best.map_or(true, |(b, _)| bound < b) {
            best = Some((bound, level));
        }
    }
    best.ok_or(Error::EnvelopeDegenerate)
}

/// The tilt Theorem-style choice underlying `envelope_regret_upper` at a
/// given level.
pub fn envelope_tilt_for_level(env: &EnvelopeSpec, n: u64, level: u64) -> f64 {
    let head = 1.0 - env.tail_sum(level);
    level as f64 / (2.0 * n as f64 * head)
}

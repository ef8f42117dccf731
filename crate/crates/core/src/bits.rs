//! Log-domain weights.
//!
//! All internal arithmetic is carried out in natural logs; codelengths are
//! reported in bits. [`LogWeight`] is the boundary type: it stores the base-2
//! logarithm of a nonnegative quantity, with negative infinity encoding exact
//! zero mass.

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Base-2 logarithm of a nonnegative quantity (bits). `NEG_INFINITY` is zero mass.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO_MASS: LogWeight = LogWeight(f64::NEG_INFINITY);

    pub fn from_bits(bits: f64) -> Self {
        LogWeight(bits)
    }

    pub fn from_ln(nats: f64) -> Self {
        LogWeight(nats * LOG2_E)
    }

    pub fn from_linear(x: f64) -> Self {
        LogWeight(x.log2())
    }

    pub fn bits(self) -> f64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        self.0 * LN_2
    }

    pub fn linear(self) -> f64 {
        self.0.exp2()
    }

    pub fn is_zero_mass(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// log(exp(a) + exp(b)) without leaving the log domain (natural logs).
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log sum exp over a slice (natural logs). Empty input is zero mass.
pub fn ln_sum_exp(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - hi).exp()).sum();
    hi + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let w = LogWeight::from_ln(-1.0);
        assert!((w.bits() + LOG2_E).abs() < 1e-15);
        assert!((w.ln() + 1.0).abs() < 1e-15);
        assert!((LogWeight::from_linear(0.25).bits() + 2.0).abs() < 1e-15);
        assert!(LogWeight::ZERO_MASS.is_zero_mass());
        assert_eq!(LogWeight::ZERO_MASS.linear(), 0.0);
    }

    #[test]
    fn ln_sum_exp_matches_direct() {
        let vals = [-1.0, -2.5, -0.3, -40.0];
        let direct: f64 = vals.iter().map(|v| v.exp()).sum();
        assert!((ln_sum_exp(&vals) - direct.ln()).abs() < 1e-14);
        assert_eq!(ln_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((ln_add_exp(f64::NEG_INFINITY, -2.0) + 2.0).abs() < 1e-15);
    }
}

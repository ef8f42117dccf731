//! Universal coding and prediction for large alphabets.
//!
//! The coding distribution is a product of tilted Stirling-ratio
//! distributions over per-symbol counts: tilting the maximized Poisson
//! likelihood `M(k) = k^k e^{-k}/k!` by `e^{-ak}` makes the counts
//! independent while staying close to the exact minimax (normalized maximum
//! likelihood) code on every count slice. The crate contains:
//!
//! - [`stirling`]: the log-domain kernel — `M(k)`, the tilted distribution,
//!   its normalizer and moments, and the moment-condition tilt solver;
//! - [`regret`]: exact regret accounting, regime bounds, two-tilt partitions,
//!   envelope classes, the tilt mixture, and redundancy bands;
//! - [`nml`]: brute-force/DP Shtarkov normalizers on small instances, ground
//!   truth for the identities the fast paths rely on;
//! - [`codec`]: a working two-pass compressor (counts first, then the
//!   arrangement) with a bit-exact container format;
//! - [`predictor`]: sequential prediction rules with log-loss evaluation;
//! - [`synth`]: seeded synthetic corpora for experiments and tests.

pub mod bits;
pub mod codec;
pub mod counts;
pub mod error;
pub mod nml;
pub mod predictor;
pub mod regret;
pub mod stirling;
pub mod synth;

pub use bits::LogWeight;
pub use counts::CountVector;
pub use error::{Error, FormatError, Result};
pub use stirling::{
    log_stirling_ratio, solve_tilt, solve_tilt_target, ClosedFormTilt, TiltSolution,
    TiltedStirling,
};

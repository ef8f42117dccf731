//! Count vectors over a finite alphabet.

use crate::error::{Error, Result};

/// Alphabet size `m` with per-symbol counts and their cached total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let total = counts.iter().sum();
        Ok(CountVector { counts, total })
    }

    /// Tally a token stream over an alphabet of declared size `m`.
    pub fn from_tokens(m: u64, tokens: &[u32]) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut counts = vec![0u64; m as usize];
        for &t in tokens {
            if u64::from(t) >= m {
                return Err(Error::TokenOutOfRange { token: t.into(), m });
            }
            counts[t as usize] += 1;
        }
        Ok(CountVector {
            counts,
            total: tokens.len() as u64,
        })
    }

    pub fn m(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, j: usize) -> u64 {
        self.counts[j]
    }

    /// Counts sorted in nonincreasing order (head-first view used by partition sweeps).
    pub fn sorted_desc(&self) -> Vec<u64> {
        let mut v = self.counts.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    pub fn distinct(&self) -> u64 {
        self.counts.iter().filter(|&&c| c > 0).count() as u64
    }

    /// Number of symbols occurring exactly `k` times.
    pub fn occurring_exactly(&self, k: u64) -> u64 {
        self.counts.iter().filter(|&&c| c == k).count() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_validation() {
        let cv = CountVector::new(vec![2, 0, 3]).unwrap();
        assert_eq!(cv.total(), 5);
        assert_eq!(cv.m(), 3);
        assert_eq!(cv.distinct(), 2);
        assert!(CountVector::new(vec![]).is_err());

        let cv = CountVector::from_tokens(3, &[0, 2, 2, 1]).unwrap();
        assert_eq!(cv.counts(), &[1, 1, 2]);
        assert!(CountVector::from_tokens(2, &[0, 5]).is_err());
    }

    #[test]
    fn corpus_statistics() {
        let cv = CountVector::new(vec![5, 1, 1, 2, 0]).unwrap();
        assert_eq!(cv.occurring_exactly(1), 2);
        assert_eq!(cv.occurring_exactly(2), 1);
        assert_eq!(cv.sorted_desc(), vec![5, 2, 1, 1, 0]);
    }
}

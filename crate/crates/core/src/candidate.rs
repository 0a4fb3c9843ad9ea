//! Candidates `p = 1 + n! * n(n+1)/2` and the recurrence between neighbours.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CandidateError {
    #[error("candidate index must be at least 1, got {0}")]
    ZeroIndex(u64),
}

/// A candidate at index `n`, holding both `p` and `m = p - 1`.
///
/// Constructed only through [`candidate_value`] or [`candidate_next`], so
/// `p = 1 + n! * n(n+1)/2` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    n: u64,
    p: BigUint,
    m: BigUint,
}

impl Candidate {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    /// `p - 1 = n! * n(n+1)/2 = (n+1)! * n / 2`.
    pub fn m(&self) -> &BigUint {
        &self.m
    }

    fn from_m(n: u64, m: BigUint) -> Self {
        let p = &m + 1u32;
        Self { n, p, m }
    }
}

/// Evaluates the candidate at `n` directly as `(n+1)! * n / 2 + 1`.
pub fn candidate_value(n: u64) -> Result<Candidate, CandidateError> {
    if n == 0 {
        return Err(CandidateError::ZeroIndex(n));
    }
    if n == 1 {
        return Ok(Candidate::from_m(1, BigUint::one()));
    }
    // (n+1)!/2 = 3 * 4 * ... * (n+1)
    let half_factorial = product_range(3, n + 1);
    Ok(Candidate::from_m(n, half_factorial * n))
}

/// Advances to index `n + 1` using `m(n+1) = m(n) / n * (n+1)(n+2)`.
///
/// `m(n) / n = (n+1)!/2` is exact for every `n >= 1`.
pub fn candidate_next(c: &Candidate) -> Candidate {
    let n = c.n;
    let (quot, rem) = num_integer::Integer::div_rem(&c.m, &BigUint::from(n));
    debug_assert!(rem == BigUint::from(0u32), "m({n}) not divisible by {n}");
    let step = u128::from(n + 1) * u128::from(n + 2);
    Candidate::from_m(n + 1, quot * step)
}

/// Infinite ascending stream of candidates starting at `start`.
#[derive(Debug, Clone)]
pub struct Candidates {
    next: Option<Candidate>,
}

impl Candidates {
    pub fn starting_at(start: u64) -> Result<Self, CandidateError> {
        Ok(Self {
            next: Some(candidate_value(start)?),
        })
    }
}

impl Iterator for Candidates {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        let current = self.next.take()?;
        self.next = Some(candidate_next(&current));
        Some(current)
    }
}

/// Product of the integers in `lo..=hi` by balanced splitting.
pub(crate) fn product_range(lo: u64, hi: u64) -> BigUint {
    if lo > hi {
        return BigUint::one();
    }
    if hi - lo < 16 {
        let mut acc = BigUint::from(lo);
        for k in lo + 1..=hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    product_range(lo, mid) * product_range(mid + 1, hi)
}

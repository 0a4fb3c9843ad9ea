//! Complete factorization of `p - 1` without touching `n!`.
//!
//! With `m = (n+1)! * n / 2`, the exponent of a prime `q <= n+1` is
//! `sum_{i>=1} floor((n+1)/q^i) + v_q(n) - [q = 2]` (Legendre plus the
//! valuation of the extra factor `n`, minus the halving).

use num_bigint::BigUint;
use num_traits::One;

use crate::sieve::primes_up_to;

/// `prime^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimePower {
    pub prime: u64,
    pub exp: u32,
}

/// Factorization of `p - 1` for the candidate at index `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredMultiplier {
    pub n: u64,
    /// Strictly increasing in `prime`; every `exp >= 1`.
    pub factors: Vec<PrimePower>,
}

impl FactoredMultiplier {
    /// `prod q^e`, the empty product being 1.
    pub fn product(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, f| {
            acc * BigUint::from(f.prime).pow(f.exp)
        })
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|f| f.prime)
    }
}

/// Exponent of `q` in `k!`.
pub fn legendre_exponent(k: u64, q: u64) -> u32 {
    let mut e = 0u64;
    let mut rest = k;
    while rest >= q {
        rest /= q;
        e += rest;
    }
    u32::try_from(e).expect("exponent overflow")
}

/// `v_q(k)`, the exponent of `q` in `k`; `k` must be nonzero.
pub fn valuation(mut k: u64, q: u64) -> u32 {
    debug_assert!(k != 0);
    let mut v = 0;
    while k % q == 0 {
        k /= q;
        v += 1;
    }
    v
}

/// Factors `m = p - 1` for index `n`. Returns no factors for `n <= 1`
/// (`m = 1`).
pub fn factor_p_minus_1(n: u64) -> FactoredMultiplier {
    if n <= 1 {
        return FactoredMultiplier { n, factors: Vec::new() };
    }
    let factors = primes_up_to(n + 1)
        .into_iter()
        .filter_map(|q| {
            let e = legendre_exponent(n + 1, q) + valuation(n, q) - u32::from(q == 2);
            (e > 0).then_some(PrimePower { prime: q, exp: e })
        })
        .collect();
    FactoredMultiplier { n, factors }
}

//! Trial-division screening that skips primes which cannot divide `p`.
//!
//! Every prime `q <= n` divides `p - 1`, so `p = 1 (mod q)`; the screen
//! starts above `n + 1`.

use num_bigint::BigUint;

use crate::candidate::Candidate;
use crate::sieve::primes_up_to;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenResult {
    /// `q` divides `p` and `1 < q < p`.
    CompositeWithFactor(u64),
    Inconclusive,
}

impl ScreenResult {
    pub fn divisor(&self) -> Option<u64> {
        match *self {
            Self::CompositeWithFactor(q) => Some(q),
            Self::Inconclusive => None,
        }
    }

    pub fn is_composite(&self) -> bool {
        self.divisor().is_some()
    }
}

/// `max(10^5, n^2)`.
pub fn default_trial_bound(n: u64) -> u64 {
    n.saturating_mul(n).max(100_000)
}

/// A prime table reusable across candidates.
#[derive(Debug, Clone)]
pub struct TrialScreen {
    limit: u64,
    primes: Vec<u64>,
}

impl TrialScreen {
    /// Sieves every prime up to `limit`.
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            primes: primes_up_to(limit),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Screens `c` with primes `n + 1 < q <= bound`; `bound` is clamped to
    /// the table limit.
    pub fn screen(&self, c: &Candidate, bound: u64) -> ScreenResult {
        self.screen_observed(c, bound, |_| {})
    }

    /// As [`screen`](Self::screen), calling `observe` with every prime
    /// actually tested, in ascending order.
    pub fn screen_observed(
        &self,
        c: &Candidate,
        bound: u64,
        observe: impl FnMut(u64),
    ) -> ScreenResult {
        self.screen_value(c.p(), c.n(), bound, observe)
    }

    /// Screens an arbitrary `p` known to be `1 (mod q)` for all primes
    /// `q <= n + 1`.
    pub fn screen_value(
        &self,
        p: &BigUint,
        n: u64,
        bound: u64,
        mut observe: impl FnMut(u64),
    ) -> ScreenResult {
        let bound = bound.min(self.limit);
        let start = self.primes.partition_point(|&q| q <= n + 1);
        let end = self.primes.partition_point(|&q| q <= bound);
        if start >= end {
            return ScreenResult::Inconclusive;
        }
        let limbs: Vec<u64> = p.iter_u64_digits().collect();
        // p itself when it is small enough to show up in the table
        let p_small = (limbs.len() == 1).then(|| limbs[0]);

        let mut i = start;
        while i < end {
            // batch primes so one multi-limb reduction serves several of them
            let mut modulus = 1u64;
            let mut j = i;
            while j < end {
                match modulus.checked_mul(self.primes[j]) {
                    Some(next) => {
                        modulus = next;
                        j += 1;
                    }
                    None => break,
                }
            }
            let r = mod_limbs(&limbs, modulus);
            for &q in &self.primes[i..j] {
                if p_small.is_some_and(|p| q >= p) {
                    return ScreenResult::Inconclusive;
                }
                observe(q);
                if r % q == 0 {
                    return ScreenResult::CompositeWithFactor(q);
                }
            }
            i = j;
        }
        ScreenResult::Inconclusive
    }
}

/// One-shot screen with a freshly sieved table.
pub fn trial_division_screen(c: &Candidate, bound: u64) -> ScreenResult {
    TrialScreen::new(bound).screen(c, bound)
}

fn mod_limbs(limbs: &[u64], m: u64) -> u64 {
    let m = u128::from(m);
    limbs
        .iter()
        .rev()
        .fold(0u128, |r, &limb| ((r << 64) | u128::from(limb)) % m) as u64
}

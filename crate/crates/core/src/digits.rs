//! Decimal size of candidates, exact and estimated from Stirling's series.

use std::f64::consts::{LN_10, PI};

use crate::candidate::Candidate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitInfo {
    pub n: u64,
    pub exact_digits: u64,
    pub stirling_estimate: u64,
}

impl DigitInfo {
    pub fn of(c: &Candidate) -> Self {
        Self {
            n: c.n(),
            exact_digits: exact_digit_count(c),
            stirling_estimate: stirling_digit_estimate(c.n()),
        }
    }
}

/// Number of decimal digits of `p`.
pub fn exact_digit_count(c: &Candidate) -> u64 {
    c.p().to_str_radix(10).len() as u64
}

/// `floor(log10 p) + 1` with `ln n!` replaced by
/// `(n + 1/2) ln n - n + ln(2 pi)/2` (the `O(1/n)` term dropped).
///
/// `n <= 1` returns 1 (`p = 2`).
pub fn stirling_digit_estimate(n: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    let x = n as f64;
    let ln_factorial = (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln();
    let ln_triangular = (x * (x + 1.0) / 2.0).ln();
    let log10_p = (ln_factorial + ln_triangular) / LN_10;
    log10_p.floor() as u64 + 1
}

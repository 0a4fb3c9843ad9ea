//! `n - 1` primality certificates.
//!
//! For `p - 1 = prod q^e` fully factored, `p` is prime if every prime `q`
//! has a witness `a` with `a^(p-1) = 1 (mod p)` and
//! `gcd(a^((p-1)/q) - 1, p) = 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::factor::{FactoredMultiplier, PrimePower};
use crate::sieve::{is_prime_small, primes_up_to};

pub const DEFAULT_WITNESS_CAP: u64 = 1000;

/// Factor primes accepted by the verifier must lie below this bound, where
/// trial division settles their primality.
pub const VERIFIER_PRIME_LIMIT: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalityCertificate {
    pub n: u64,
    pub p: BigUint,
    /// Factorization of `p - 1`, strictly increasing primes.
    pub factors: Vec<PrimePower>,
    /// Witness base per prime factor of `p - 1`.
    pub witnesses: BTreeMap<u64, BigUint>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("composite-detected: {base}^(p-1) != 1 (mod p)")]
    CompositeDetected { base: u64 },
    #[error("witness-exhausted: no base <= {cap} works for q={q}")]
    WitnessExhausted { q: u64, cap: u64 },
    #[error("factorization is for n={factored}, candidate has n={candidate}")]
    IndexMismatch { candidate: u64, factored: u64 },
}

/// Why [`verify_certificate`] rejected a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    BadProduct,
    BadFactorOrder,
    BadFactorPrime(u64),
    MissingWitness(u64),
    UnexpectedWitness(u64),
    FermatFail(u64),
    GcdFail(u64),
    WitnessRange(u64),
    BadIndex,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadProduct => f.write_str("bad-product"),
            Self::BadFactorOrder => f.write_str("bad-factor-order"),
            Self::BadFactorPrime(q) => write!(f, "bad-factor-prime({q})"),
            Self::MissingWitness(q) => write!(f, "missing-witness({q})"),
            Self::UnexpectedWitness(q) => write!(f, "unexpected-witness({q})"),
            Self::FermatFail(q) => write!(f, "fermat-fail({q})"),
            Self::GcdFail(q) => write!(f, "gcd-fail({q})"),
            Self::WitnessRange(q) => write!(f, "witness-range({q})"),
            Self::BadIndex => f.write_str("bad-index"),
        }
    }
}

impl std::error::Error for RejectReason {}

/// Builds a certificate with the default witness cap.
pub fn build_certificate(
    c: &Candidate,
    f: &FactoredMultiplier,
) -> Result<PrimalityCertificate, CertificateError> {
    build_certificate_with_cap(c, f, DEFAULT_WITNESS_CAP)
}

/// For each prime `q | p - 1`, picks the smallest prime base `a <= cap`,
/// `a < p`, that satisfies both witness conditions.
pub fn build_certificate_with_cap(
    c: &Candidate,
    f: &FactoredMultiplier,
    cap: u64,
) -> Result<PrimalityCertificate, CertificateError> {
    if f.n != c.n() {
        return Err(CertificateError::IndexMismatch {
            candidate: c.n(),
            factored: f.n,
        });
    }
    let p = c.p();
    let m = c.m();
    if f.factors.is_empty() {
        // p = 2, nothing to witness
        return Ok(PrimalityCertificate {
            n: c.n(),
            p: p.clone(),
            factors: Vec::new(),
            witnesses: BTreeMap::new(),
        });
    }

    let bases: Vec<u64> = primes_up_to(cap)
        .into_iter()
        .take_while(|&a| BigUint::from(a) < *p)
        .collect();
    let mut fermat_ok: HashMap<u64, bool> = HashMap::new();
    let mut witnesses = BTreeMap::new();

    for q in f.primes() {
        let cofactor = m / q;
        let mut found = None;
        for &a in &bases {
            let base = BigUint::from(a);
            let ok = *fermat_ok
                .entry(a)
                .or_insert_with(|| base.modpow(m, p).is_one());
            if !ok {
                return Err(CertificateError::CompositeDetected { base: a });
            }
            let r = base.modpow(&cofactor, p);
            let r_minus_1 = if r.is_zero() { p - 1u32 } else { r - 1u32 };
            if r_minus_1.gcd(p).is_one() {
                found = Some(base);
                break;
            }
        }
        match found {
            Some(a) => {
                witnesses.insert(q, a);
            }
            None => return Err(CertificateError::WitnessExhausted { q, cap }),
        }
    }

    Ok(PrimalityCertificate {
        n: c.n(),
        p: p.clone(),
        factors: f.factors.clone(),
        witnesses,
    })
}

/// Rechecks a certificate from scratch. Nothing in it is trusted.
pub fn verify_certificate(cert: &PrimalityCertificate) -> Result<(), RejectReason> {
    let p = &cert.p;

    let mut previous = 0u64;
    for f in &cert.factors {
        if f.prime <= previous || f.exp == 0 {
            return Err(RejectReason::BadFactorOrder);
        }
        previous = f.prime;
    }

    if p.is_zero() {
        return Err(RejectReason::BadProduct);
    }
    let p_minus_1 = p - 1u32;
    let mut product = BigUint::one();
    for f in &cert.factors {
        for _ in 0..f.exp {
            product *= f.prime;
            if product > p_minus_1 {
                return Err(RejectReason::BadProduct);
            }
        }
    }
    if product != p_minus_1 {
        return Err(RejectReason::BadProduct);
    }

    for f in &cert.factors {
        if f.prime >= VERIFIER_PRIME_LIMIT || !is_prime_small(f.prime) {
            return Err(RejectReason::BadFactorPrime(f.prime));
        }
    }

    for f in &cert.factors {
        if !cert.witnesses.contains_key(&f.prime) {
            return Err(RejectReason::MissingWitness(f.prime));
        }
    }
    for &q in cert.witnesses.keys() {
        if !cert.factors.iter().any(|f| f.prime == q) {
            return Err(RejectReason::UnexpectedWitness(q));
        }
    }

    let mut fermat_ok: BTreeMap<&BigUint, bool> = BTreeMap::new();
    for f in &cert.factors {
        let q = f.prime;
        let a = &cert.witnesses[&q];
        let ok = *fermat_ok
            .entry(a)
            .or_insert_with(|| a.modpow(&p_minus_1, p).is_one());
        if !ok {
            return Err(RejectReason::FermatFail(q));
        }
        let r = a.modpow(&(&p_minus_1 / q), p);
        let g = if r.is_zero() {
            p.clone()
        } else {
            (r - 1u32).gcd(p)
        };
        if !g.is_one() {
            return Err(RejectReason::GcdFail(q));
        }
        if a >= p || a.is_one() || a.is_zero() {
            return Err(RejectReason::WitnessRange(q));
        }
    }

    if !matches_index(cert.n, p) {
        return Err(RejectReason::BadIndex);
    }
    Ok(())
}

/// `p == 1 + n! * n(n+1)/2`, evaluated by a plain running product that
/// gives up as soon as it passes `p`.
fn matches_index(n: u64, p: &BigUint) -> bool {
    if n == 0 {
        return false;
    }
    let Some(triangular) = n.checked_mul(n + 1).map(|t| t / 2) else {
        return false;
    };
    let mut acc = BigUint::from(triangular);
    for k in 2..=n {
        acc *= k;
        if acc >= *p {
            return false;
        }
    }
    acc + 1u32 == *p
}

#[derive(Debug, Error)]
pub enum CertificateParseError {
    #[error("malformed certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field {field}: {value:?} is not a canonical decimal integer")]
    BadInteger { field: &'static str, value: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateWire {
    n: u64,
    p: String,
    factors: Vec<(u64, u32)>,
    witnesses: BTreeMap<u64, String>,
}

fn parse_decimal(field: &'static str, s: &str) -> Result<BigUint, CertificateParseError> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit())
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(CertificateParseError::BadInteger {
            field,
            value: s.to_owned(),
        });
    }
    Ok(s.parse().expect("validated decimal"))
}

impl PrimalityCertificate {
    /// The degenerate certificate for `p = 2`.
    pub fn is_axiomatic(&self) -> bool {
        self.factors.is_empty()
    }

    /// Canonical single-line JSON (no trailing newline). Keys appear as
    /// `n, p, factors, witnesses`; witness keys ascend numerically.
    pub fn to_json(&self) -> String {
        let wire = CertificateWire {
            n: self.n,
            p: self.p.to_str_radix(10),
            factors: self.factors.iter().map(|f| (f.prime, f.exp)).collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|(&q, a)| (q, a.to_str_radix(10)))
                .collect(),
        };
        serde_json::to_string(&wire).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CertificateParseError> {
        let wire: CertificateWire = serde_json::from_str(s)?;
        let p = parse_decimal("p", &wire.p)?;
        let witnesses = wire
            .witnesses
            .iter()
            .map(|(&q, a)| Ok((q, parse_decimal("witnesses", a)?)))
            .collect::<Result<_, CertificateParseError>>()?;
        Ok(Self {
            n: wire.n,
            p,
            factors: wire
                .factors
                .into_iter()
                .map(|(prime, exp)| PrimePower { prime, exp })
                .collect(),
            witnesses,
        })
    }
}

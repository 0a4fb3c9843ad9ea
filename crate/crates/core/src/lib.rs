//! Search, proof and certification of primes of the form
//! `p = 1 + n! * n(n+1)/2`, equivalently `p = 1 + (n+1)! * n / 2`.
//!
//! The crate is split the same way the pipeline runs:
//!
//! * [`candidate`], [`factor`] and [`digits`] build candidates, factor `p - 1`
//!   completely and size `p`.
//! * [`primality`] screens candidates, runs a BPSW probable-prime test and
//!   builds / verifies `n - 1` (generalized Pocklington) certificates.
//! * [`search`] drives the pipeline over a range of `n` with a worker pool,
//!   ordered output and checkpoint/resume.
//! * [`table`] renders the list of found primes.
//!
//! ```
//! use sigma_fact_core::{candidate_value, factor_p_minus_1, probable_prime_test, build_certificate, verify_certificate};
//!
//! let c = candidate_value(12).unwrap();
//! assert_eq!(c.p().to_string(), "37362124801");
//! assert!(probable_prime_test(c.p()));
//! let cert = build_certificate(&c, &factor_p_minus_1(12)).unwrap();
//! assert!(verify_certificate(&cert).is_ok());
//! ```

#![deny(unsafe_code)]
#![warn(missing_debug_implementations)]

pub mod candidate;
pub mod digits;
pub mod factor;
pub mod primality;
pub mod search;
pub mod sieve;
pub mod table;

pub use candidate::{candidate_next, candidate_value, Candidate, CandidateError, Candidates};
pub use digits::{exact_digit_count, stirling_digit_estimate, DigitInfo};
pub use factor::{factor_p_minus_1, FactoredMultiplier, PrimePower};
pub use primality::certificate::{
    build_certificate, verify_certificate, CertificateError, CertificateParseError,
    PrimalityCertificate, RejectReason,
    DEFAULT_WITNESS_CAP,
};
pub use primality::screen::{default_trial_bound, trial_division_screen, ScreenResult, TrialScreen};
pub use primality::{is_strong_lucas_probable_prime, miller_rabin_base2, probable_prime_test};
pub use search::checkpoint::{checkpoint_load, checkpoint_save, CheckpointError, CheckpointState};
pub use search::record::{SearchRecord, Verdict};
pub use search::{run_search, Search, SearchConfig, SearchError, SearchReport};
pub use table::{prime_table, render_table, TableRow};

pub use num_bigint::BigUint;

//! Per-index search outcome and its JSONL form.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::primality::certificate::PrimalityCertificate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    PrimeCertified,
    Composite,
    /// BPSW said prime but no certificate could be produced.
    Unproven { reason: String },
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PrimeCertified => "prime_certified",
            Self::Composite => "composite",
            Self::Unproven { .. } => "unproven",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchRecord {
    pub n: u64,
    pub verdict: Verdict,
    /// Exact decimal digit count of `p`.
    pub digits: u64,
    /// Small prime factor found by trial division, if any.
    pub divisor: Option<u64>,
    pub elapsed: Duration,
    /// Certificate file name, relative to the certificate directory.
    pub certificate_path: Option<String>,
    pub certificate: Option<PrimalityCertificate>,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    n: u64,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
    digits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    divisor: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_path: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u64>,
}

#[derive(Deserialize)]
struct IndexOnly {
    n: u64,
}

impl SearchRecord {
    pub fn is_prime(&self) -> bool {
        self.verdict == Verdict::PrimeCertified
    }

    /// One JSONL line without the trailing newline. Timing is left out unless
    /// asked for, so the line depends only on `n` and the configuration.
    pub fn to_json_line(&self, include_timing: bool) -> String {
        let line = RecordLine {
            n: self.n,
            verdict: self.verdict.as_str(),
            reason: match &self.verdict {
                Verdict::Unproven { reason } => Some(reason),
                _ => None,
            },
            digits: self.digits,
            divisor: self.divisor,
            certificate_path: self.certificate_path.as_deref(),
            elapsed_ms: include_timing.then_some(self.elapsed.as_millis() as u64),
        };
        serde_json::to_string(&line).expect("record serializes")
    }

    /// Reads back just the index of a JSONL line.
    pub fn index_of_line(line: &str) -> Option<u64> {
        serde_json::from_str::<IndexOnly>(line).ok().map(|r| r.n)
    }
}

/// Certificate file name for index `n`.
pub fn certificate_file_name(n: u64) -> String {
    format!("cert-{n}.json")
}

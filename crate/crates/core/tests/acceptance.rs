//! Exit criteria for the search, proof and certification pipeline.
//!
//! Each test prints one `PASS`/`FAIL` line; run with `--nocapture` to see
//! them. The [401, 950] sweep dominates the runtime (about a minute on one
//! core).

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use sigma_fact_core::{
    build_certificate, candidate_value, exact_digit_count, factor_p_minus_1, run_search,
    stirling_digit_estimate, verify_certificate, PrimalityCertificate, Search, SearchConfig,
    SearchRecord, Verdict,
};

const PRIME_INDICES: [u64; 17] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 19, 24, 251, 374];

/// Table rows 1-15: (n, p, digits).
const SMALL_ROWS: [(u64, &str, u64); 15] = [
    (1, "2", 1),
    (2, "7", 1),
    (3, "37", 2),
    (4, "241", 3),
    (5, "1801", 4),
    (6, "15121", 5),
    (7, "141151", 6),
    (8, "1451521", 7),
    (9, "16329601", 8),
    (10, "199584001", 9),
    (12, "37362124801", 11),
    (13, "566658892801", 12),
    (14, "9153720576001", 13),
    (19, "23112569077678080001", 20),
    (24, "186134520519971831808000001", 27),
];

fn report(criterion: u32, ok: bool, detail: impl AsRef<str>) {
    println!(
        "{} criterion {criterion}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
}

fn prime_indices(records: &[SearchRecord]) -> Vec<u64> {
    records.iter().filter(|r| r.is_prime()).map(|r| r.n).collect()
}

#[test]
fn criterion_1_table_reproduction_small() {
    let started = Instant::now();
    let records = run_search(1, 24, &SearchConfig::default()).unwrap();
    let rows: Vec<(u64, String, u64)> = records
        .iter()
        .filter(|r| r.is_prime())
        .map(|r| (r.n, r.certificate.as_ref().unwrap().p.to_string(), r.digits))
        .collect();
    let elapsed = started.elapsed();
    let expected: Vec<(u64, String, u64)> = SMALL_ROWS.iter().map(|&(n, p, d)| (n, p.to_owned(), d)).collect();
    let mismatched: Vec<String> = rows
        .iter()
        .zip(&expected)
        .filter(|(got, want)| got != want)
        .map(|(got, want)| format!("n={}: computed p={} digits={}, table p={} digits={}", want.0, got.1, got.2, want.1, want.2))
        .collect();
    let ok = rows.len() == expected.len() && mismatched.is_empty() && elapsed < Duration::from_secs(1);
    report(
        1,
        ok,
        format!("{} rows for n <= 24 in {elapsed:?}; mismatches {mismatched:?}", rows.len()),
    );
    assert_eq!(rows.len(), expected.len());
    assert!(mismatched.is_empty(), "{mismatched:?}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

#[test]
fn criterion_2_search_to_400() {
    let started = Instant::now();
    let records = run_search(1, 400, &SearchConfig::default()).unwrap();
    let elapsed = started.elapsed();
    let found = prime_indices(&records);
    let digits = |n: u64| records.iter().find(|r| r.n == n).map(|r| r.digits);
    let ok = found == PRIME_INDICES
        && digits(251) == Some(500)
        && digits(374) == Some(807)
        && elapsed < Duration::from_secs(300);
    report(2, ok, format!("primes {found:?} in {elapsed:?} (1 worker)"));
    assert_eq!(found, PRIME_INDICES);
    assert_eq!(digits(251), Some(500));
    assert_eq!(digits(374), Some(807));
    assert!(records.iter().all(|r| r.verdict != Verdict::Unproven { reason: String::new() }));
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
}

#[test]
fn criterion_3_no_primes_between_401_and_950() {
    let started = Instant::now();
    let config = SearchConfig { workers: 4, ..SearchConfig::default() };
    let records = run_search(401, 950, &config).unwrap();
    let elapsed = started.elapsed();
    let found = prime_indices(&records);
    let unproven = records.iter().filter(|r| matches!(r.verdict, Verdict::Unproven { .. })).count();
    let ok = records.len() == 550 && found.is_empty() && unproven == 0 && elapsed < Duration::from_secs(3600);
    report(3, ok, format!("{} records, primes {found:?}, in {elapsed:?} (4 workers)", records.len()));
    assert_eq!(records.len(), 550);
    assert!(found.is_empty());
    assert_eq!(unproven, 0);
    assert!(elapsed < Duration::from_secs(3600), "took {elapsed:?}");
}

/// Single-field mutations that each break a valid certificate.
fn mutations(cert: &PrimalityCertificate) -> Vec<(String, PrimalityCertificate)> {
    let mut out = Vec::new();
    let mut push = |label: String, c: PrimalityCertificate| out.push((label, c));

    for delta in [1u32, 2] {
        let mut c = cert.clone();
        c.p += delta;
        push(format!("p+{delta}"), c);
    }
    let mut c = cert.clone();
    c.p -= 1u32;
    push("p-1".into(), c);
    for n in [cert.n + 1, cert.n.saturating_sub(1)] {
        let mut c = cert.clone();
        c.n = n;
        push(format!("n={n}"), c);
    }
    for i in 0..cert.factors.len() {
        let q = cert.factors[i].prime;
        let mut c = cert.clone();
        c.factors[i].exp += 1;
        push(format!("exp({q})+1"), c);
        let mut c = cert.clone();
        c.factors[i].exp -= 1;
        push(format!("exp({q})-1"), c);
        let mut c = cert.clone();
        c.factors.remove(i);
        push(format!("drop factor {q}"), c);
    }
    // a full verification of the 500- and 807-digit certificates costs
    // seconds, so only their first and last witnesses are mutated
    let keys: Vec<u64> = cert.witnesses.keys().copied().collect();
    let chosen: Vec<u64> = if keys.len() > 20 {
        vec![keys[0], keys[keys.len() - 1]]
    } else {
        keys
    };
    for (&q, a) in cert.witnesses.iter().filter(|(q, _)| chosen.contains(q)) {
        for (label, bad) in [
            ("1", BigUint::from(1u32)),
            ("0", BigUint::from(0u32)),
            // a q-th power has (p-1)/q-th power 1
            ("a^q", a.modpow(&BigUint::from(q), &cert.p)),
            ("a+p", a + &cert.p),
        ] {
            let mut c = cert.clone();
            c.witnesses.insert(q, bad);
            push(format!("witness({q})={label}"), c);
        }
        let mut c = cert.clone();
        c.witnesses.remove(&q);
        push(format!("drop witness {q}"), c);
    }
    out
}

#[test]
fn criterion_4_certificates_and_tampering() {
    let mut certs = Vec::new();
    for n in PRIME_INDICES {
        let c = candidate_value(n).unwrap();
        let cert = build_certificate(&c, &factor_p_minus_1(n)).unwrap();
        assert_eq!(verify_certificate(&cert), Ok(()), "n={n}");
        let reparsed = PrimalityCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(verify_certificate(&reparsed), Ok(()), "n={n} after JSON");
        certs.push(cert);
    }

    let mut tampered = 0usize;
    let mut false_accepts = Vec::new();
    for cert in &certs {
        for (label, bad) in mutations(cert) {
            tampered += 1;
            if verify_certificate(&bad).is_ok() {
                false_accepts.push(format!("n={} {label}", cert.n));
            }
        }
    }
    let ok = certs.len() == 17 && tampered >= 100 && false_accepts.is_empty();
    report(
        4,
        ok,
        format!("17/17 certificates verify; {tampered} tampered variants, {} false accepts", false_accepts.len()),
    );
    assert!(tampered >= 100, "{tampered}");
    assert!(false_accepts.is_empty(), "{false_accepts:?}");
}

#[test]
fn criterion_5_stirling_estimate() {
    let mut worst = 0u64;
    for n in 2..=400u64 {
        let exact = exact_digit_count(&candidate_value(n).unwrap());
        worst = worst.max(exact.abs_diff(stirling_digit_estimate(n)));
    }
    let exact_at = [(24, 27), (251, 500), (374, 807)];
    let table_ok = exact_at.iter().all(|&(n, d)| stirling_digit_estimate(n) == d);
    report(5, worst <= 1 && table_ok, format!("max |estimate - exact| = {worst} over 2..=400"));
    assert!(worst <= 1);
    assert!(table_ok);
}

fn trial_division_is_prime(p: u128) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u128;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[test]
fn criterion_6_oracle_equivalence() {
    let records = run_search(1, 14, &SearchConfig::default()).unwrap();
    let mut mismatches = Vec::new();
    for r in &records {
        let p: u128 = candidate_value(r.n).unwrap().p().try_into().unwrap();
        if r.is_prime() != trial_division_is_prime(p) {
            mismatches.push(r.n);
        }
    }
    report(6, mismatches.is_empty(), format!("n = 1..=14 against trial division to sqrt(p); mismatches {mismatches:?}"));
    assert!(mismatches.is_empty());
}

fn persisted_config(dir: &Path, workers: usize) -> SearchConfig {
    SearchConfig {
        workers,
        checkpoint_path: Some(dir.join("checkpoint.json")),
        results_path: Some(dir.join("results.jsonl")),
        certs_dir: Some(dir.join("certs")),
        ..SearchConfig::default()
    }
}

/// Results stream plus every certificate file, by name.
fn snapshot(dir: &Path) -> (Vec<u8>, Vec<(String, Vec<u8>)>) {
    let results = fs::read(dir.join("results.jsonl")).unwrap();
    let mut certs: Vec<(String, Vec<u8>)> = fs::read_dir(dir.join("certs"))
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    certs.sort();
    (results, certs)
}

#[test]
fn criterion_7_determinism_and_resume() {
    const TO: u64 = 400;

    let baseline_dir = tempfile::tempdir().unwrap();
    Search::new(persisted_config(baseline_dir.path(), 1)).run(1, TO).unwrap();
    let baseline = snapshot(baseline_dir.path());

    let pooled_dir = tempfile::tempdir().unwrap();
    Search::new(persisted_config(pooled_dir.path(), 4)).run(1, TO).unwrap();
    let workers_invariant = snapshot(pooled_dir.path()) == baseline;

    // interrupt at a random index, then resume
    let kill_at = rand::thread_rng().gen_range(1..TO);
    let resumed_dir = tempfile::tempdir().unwrap();
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    let first = Search::new(persisted_config(resumed_dir.path(), 4))
        .with_stop_flag(stop)
        .on_record(move |r| {
            if r.n == kill_at {
                flag.store(true, Ordering::SeqCst);
            }
        })
        .run(1, TO)
        .unwrap();
    assert!(first.interrupted);

    // leave debris a crash could leave behind: a record past the
    // checkpoint and a torn line
    let results_path = resumed_dir.path().join("results.jsonl");
    let mut debris = fs::read_to_string(&results_path).unwrap();
    debris.push_str(&format!("{{\"n\":{},\"verdict\":\"composite\",\"digits\":1}}\n{{\"n\":", kill_at + 1));
    fs::write(&results_path, debris).unwrap();

    let second = Search::new(persisted_config(resumed_dir.path(), 1)).run(1, TO).unwrap();
    assert_eq!(second.resumed_from, Some(kill_at + 1));
    let resume_identical = snapshot(resumed_dir.path()) == baseline;
    let found: BTreeSet<u64> = second.found.iter().copied().collect();

    let ok = workers_invariant && resume_identical && found == PRIME_INDICES.into_iter().collect();
    report(
        7,
        ok,
        format!("workers {{1,4}} identical: {workers_invariant}; killed at n={kill_at}, resumed identical: {resume_identical}"),
    );
    assert!(workers_invariant);
    assert!(resume_identical, "killed at n={kill_at}");
    assert_eq!(found, PRIME_INDICES.into_iter().collect());
}

use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;
use sigma_fact_core::{
    build_certificate, candidate_next, candidate_value, factor_p_minus_1, verify_certificate,
    PrimalityCertificate,
};

/// Certified primes small enough to verify thousands of times.
const SMALL_PRIME_INDICES: [u64; 15] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 19, 24];

fn certificate(n: u64) -> PrimalityCertificate {
    build_certificate(&candidate_value(n).unwrap(), &factor_p_minus_1(n)).unwrap()
}

#[derive(Debug, Clone)]
enum Mutation {
    P(u32, bool),
    N(u64),
    Exponent(usize, bool),
    Prime(usize, u64),
    WitnessPower(usize),
    WitnessConst(usize, u32),
}

fn mutation() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        (1u32..1000, any::<bool>()).prop_map(|(d, up)| Mutation::P(d, up)),
        (1u64..50).prop_map(Mutation::N),
        (any::<usize>(), any::<bool>()).prop_map(|(i, up)| Mutation::Exponent(i, up)),
        (any::<usize>(), 1u64..20).prop_map(|(i, d)| Mutation::Prime(i, d)),
        any::<usize>().prop_map(Mutation::WitnessPower),
        (any::<usize>(), 0u32..2).prop_map(|(i, v)| Mutation::WitnessConst(i, v)),
    ]
}

/// Applies `m`; `None` when it does not apply to this certificate (p = 2
/// has no factors or witnesses).
fn apply(cert: &PrimalityCertificate, m: &Mutation) -> Option<PrimalityCertificate> {
    let mut c = cert.clone();
    let k = c.factors.len();
    match *m {
        Mutation::P(d, true) => c.p += d,
        Mutation::P(d, false) => {
            if c.p <= BigUint::from(d) {
                return None;
            }
            c.p -= d;
        }
        Mutation::N(d) => c.n += d,
        Mutation::Exponent(i, up) => {
            let f = c.factors.get_mut(i.checked_rem(k)?)?;
            if up {
                f.exp += 1;
            } else {
                f.exp -= 1;
            }
        }
        Mutation::Prime(i, d) => {
            let i = i.checked_rem(k)?;
            c.factors[i].prime += d;
            let q = c.factors[i].prime;
            let a = c.witnesses.remove(&(q - d))?;
            c.witnesses.insert(q, a);
        }
        Mutation::WitnessPower(i) => {
            let q = c.factors.get(i.checked_rem(k)?)?.prime;
            let a = c.witnesses.get_mut(&q)?;
            *a = a.modpow(&BigUint::from(q), &cert.p);
        }
        Mutation::WitnessConst(i, v) => {
            let q = c.factors.get(i.checked_rem(k)?)?.prime;
            c.witnesses.insert(q, BigUint::from(v));
        }
    }
    Some(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn single_field_mutation_is_rejected(idx in 0usize..SMALL_PRIME_INDICES.len(), m in mutation()) {
        let cert = certificate(SMALL_PRIME_INDICES[idx]);
        if let Some(bad) = apply(&cert, &m) {
            prop_assert!(verify_certificate(&bad).is_err(), "{:?} accepted after {:?}", bad, m);
        }
    }

    #[test]
    fn certificate_json_roundtrip(idx in 0usize..SMALL_PRIME_INDICES.len()) {
        let cert = certificate(SMALL_PRIME_INDICES[idx]);
        let json = cert.to_json();
        let back = PrimalityCertificate::from_json(&json).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert_eq!(back.to_json(), json);
    }

    #[test]
    fn recurrence_agrees_with_direct(n in 1u64..=200) {
        prop_assert_eq!(candidate_next(&candidate_value(n).unwrap()), candidate_value(n + 1).unwrap());
    }

    #[test]
    fn factorization_is_complete(n in 1u64..=600) {
        let c = candidate_value(n).unwrap();
        let f = factor_p_minus_1(n);
        prop_assert_eq!(&f.product(), c.m());
        for k in 2..=n {
            prop_assert!((c.m() % k).is_zero());
        }
    }
}

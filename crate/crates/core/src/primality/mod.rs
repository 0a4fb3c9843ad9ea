//! Compositeness screening, BPSW probable-prime testing and `n - 1`
//! certificates.

pub mod certificate;
pub mod screen;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::sieve::is_prime_small;

const SMALL_CUTOFF: u64 = 1 << 20;

/// BPSW: strong Fermat test to base 2 followed by a strong Lucas test with
/// Selfridge parameters. Deterministic; no composite is known to pass.
pub fn probable_prime_test(p: &BigUint) -> bool {
    if let Some(small) = p.to_u64().filter(|&v| v < SMALL_CUTOFF) {
        return is_prime_small(small);
    }
    if p.is_even() {
        return false;
    }
    miller_rabin_base2(p) && is_strong_lucas_probable_prime(p)
}

/// Strong probable-prime test to base 2. `n` must be odd and greater than 2.
pub fn miller_rabin_base2(n: &BigUint) -> bool {
    debug_assert!(n.is_odd() && *n > BigUint::from(2u32));
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(2u32).modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Jacobi symbol `(a/n)` for odd `n > 0`.
pub fn jacobi(a: &BigUint, n: &BigUint) -> i8 {
    assert!(n.is_odd(), "Jacobi symbol needs an odd modulus");
    let mut a = a % n;
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n_mod_8 = low_bits(&n) & 7;
            if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if low_bits(&a) & 3 == 3 && low_bits(&n) & 3 == 3 {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test, Selfridge method A (`P = 1`,
/// `Q = (1 - D)/4`, first `D` in 5, -7, 9, -11, ... with `(D/n) = -1`).
pub fn is_strong_lucas_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if *n == two {
        return true;
    }
    if n.is_even() || is_perfect_square(n) {
        return false;
    }

    let mut d: i64 = 5;
    loop {
        let d_mod = signed_mod(d, n);
        match jacobi(&d_mod, n) {
            -1 => break,
            // (D/n) = 0 with n != |D| means gcd(|D|, n) is a proper factor.
            0 if *n != BigUint::from(d.unsigned_abs()) => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let d_mod = signed_mod(d, n);
    let q_mod = signed_mod(q, n);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // U_1 = 1, V_1 = P = 1, Q^1
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    for bit in (0..k.bits() - 1).rev() {
        u = &u * &v % n;
        v = sub_mod(&(&v * &v % n), &(&qk * 2u32 % n), n);
        qk = &qk * &qk % n;
        if k.bit(bit) {
            let u_next = half_mod(&(&u + &v), n);
            let v_next = half_mod(&(&d_mod * &u + &v), n);
            u = u_next;
            v = v_next;
            qk = &qk * &q_mod % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = sub_mod(&(&v * &v % n), &(&qk * 2u32 % n), n);
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}

fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

fn signed_mod(x: i64, n: &BigUint) -> BigUint {
    let r = BigUint::from(x.unsigned_abs()) % n;
    if x < 0 && !r.is_zero() {
        n - r
    } else {
        r
    }
}

fn sub_mod(a: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        a + n - b
    }
}

/// `x / 2 mod n` for odd `n`; `x` may be up to `2n`.
fn half_mod(x: &BigUint, n: &BigUint) -> BigUint {
    let x = if x.is_odd() { x + n } else { x.clone() };
    (x >> 1u32) % n
}

fn low_bits(x: &BigUint) -> u64 {
    x.iter_u64_digits().next().unwrap_or(0)
}

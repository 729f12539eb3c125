//! Iterated logarithm and the power tower, base 2.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `tower(0) = 1`, `tower(k) = 2^tower(k-1)`.
///
/// Panics for `k > 5`; `tower(6)` has 2^65536 bits.
pub fn tower(k: u32) -> BigUint {
    assert!(k <= 5, "tower({k}) is not representable");
    let mut t = BigUint::one();
    for _ in 0..k {
        let e = t.to_u64().expect("exponent fits for k <= 5");
        t = BigUint::one() << e;
    }
    t
}

/// Number of times `log2` must be applied to `n` until the value is at
/// most 1. Uses `log*(n) = 1 + log*(ceil(log2 n))` for `n > 1`, which is
/// exact over the integers.
pub fn log_star(n: &BigUint) -> u32 {
    if n <= &BigUint::one() {
        return 0;
    }
    let ceil_log2 = (n - 1u32).bits();
    1 + log_star_u64(ceil_log2)
}

pub fn log_star_u64(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        1 + log_star_u64(64 - (n - 1).leading_zeros() as u64)
    }
}

/// `log*` of a positive real, by direct iteration.
pub fn log_star_f64(x: f64) -> u32 {
    let mut x = x;
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

/// `log2(n)` as a float; exact for powers of two of any size.
pub fn log2_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

//! Primality testing and random prime sampling.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin over big integers. Exact below 3.3e24, probabilistic above.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != num_bigint::Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let n = n.magnitude();
    let one = BigUint::one();
    let n1 = n - &one;
    let mut d = n1.clone();
    let mut s = 0u32;
    while (&d % 2u32).is_zero() {
        d >>= 1;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A uniformly random prime in `[2^(bits-1), 2^bits)`, `2 <= bits <= 63`.
pub fn random_prime<R: Rng>(rng: &mut R, bits: u32) -> u64 {
    assert!((2..=63).contains(&bits), "prime width out of range");
    let lo = 1u64 << (bits - 1);
    let hi = 1u64 << bits;
    loop {
        let c = rng.gen_range(lo..hi);
        if is_prime_u64(c) {
            return c;
        }
    }
}

/// Exact count of primes in `[2^(bits-1), 2^bits)` for `bits <= 24`.
pub fn count_primes_with_bits(bits: u32) -> Option<u64> {
    if !(2..=24).contains(&bits) {
        return None;
    }
    let hi = 1usize << bits;
    let lo = 1usize << (bits - 1);
    let mut sieve = vec![true; hi];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < hi {
        if sieve[i] {
            let mut j = i * i;
            while j < hi {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    Some(sieve[lo..hi].iter().filter(|&&b| b).count() as u64)
}

/// A lower bound on the number of primes with exactly `bits` bits.
pub fn prime_count_lower_bound(bits: u32) -> u64 {
    if let Some(c) = count_primes_with_bits(bits) {
        return c;
    }
    // pi(2x) - pi(x) >= x / (2 ln 2x) >= 2^(b-1) / (2b) for b > 24
    (1u64 << (bits - 1)) / (2 * bits as u64)
}

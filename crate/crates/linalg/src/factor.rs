//! Small-integer primality and factorization helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of a 64-bit integer, sorted, with multiplicity.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut stack = vec![n];
    let mut n0 = n;
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n0 % p == 0 && n0 > 1 {
            primes.push(p);
            n0 /= p;
        }
    }
    stack[0] = n0;
    while let Some(m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Splits |n| into known prime factors and a leftover cofactor that could not be factored.
pub fn factor_big(n: &BigInt) -> (Vec<BigInt>, BigInt) {
    let mut n = n.abs();
    if n.is_zero() {
        return (vec![], BigInt::zero());
    }
    if let Some(m) = n.to_u64() {
        return (factor_u64(m).into_iter().map(|(p, _)| BigInt::from(p)).collect(), BigInt::one());
    }
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < 100_000 {
        let bp = BigInt::from(p);
        if n.is_multiple_of(&bp) {
            primes.push(bp.clone());
            while n.is_multiple_of(&bp) {
                n /= &bp;
            }
        }
        if let Some(m) = n.to_u64() {
            for (q, _) in factor_u64(m) {
                primes.push(BigInt::from(q));
            }
            primes.sort();
            primes.dedup();
            return (primes, BigInt::one());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (primes, n)
}

/// Primes just below 2^62 used for multimodular reconstruction.
pub fn large_primes(count: usize) -> Vec<u64> {
    use std::sync::OnceLock;
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    let cached = CACHE.get_or_init(|| {
        let mut v = Vec::new();
        let mut n = (1u64 << 62) - 57;
        while v.len() < 64 {
            if is_prime_u64(n) {
                v.push(n);
            }
            n -= 2;
        }
        v
    });
    if count <= cached.len() {
        return cached[..count].to_vec();
    }
    let mut v = cached.clone();
    let mut n = *v.last().unwrap() - 2;
    while v.len() < count {
        if is_prime_u64(n) {
            v.push(n);
        }
        n -= 2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorizations() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(1_000_000_007 * 998_244_353), vec![(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn primality_against_sieve() {
        let mut sieve = vec![true; 2000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..2000 {
            if sieve[i] {
                for j in (i * i..2000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &s) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(i as u64), s, "{i}");
        }
    }

    #[test]
    fn large_primes_are_prime() {
        for p in large_primes(5) {
            assert!(is_prime_u64(p));
            assert!(p > 1 << 61);
        }
    }
}

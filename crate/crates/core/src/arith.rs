//! Elementary number theory on machine integers.

pub use modvis_linalg::factor::{factor_u64, is_prime_u64};

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u(a: u64, b: u64) -> u64 {
    gcd(a as i64, b as i64) as u64
}

/// Returns (g, x, y) with a·x + b·y = g ≥ 0.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of a modulo m (m ≥ 1), if it exists; the inverse modulo 1 is 0.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = xgcd(a.rem_euclid(m), m);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m))
}

pub fn prime_factors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut d = vec![1u64];
    for (p, e) in factor_u64(n) {
        let cur = d.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            d.extend(cur.iter().map(|x| x * pk));
        }
    }
    d.sort_unstable();
    d
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i as u64).collect()
}

/// Index of Γ₀(N) in SL₂(ℤ): N·∏_{q|N}(1 + 1/q).
pub fn psi(n: u64) -> u64 {
    factor_u64(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p + 1))
}

/// Sturm bound for weight 2 on Γ₀(N): ⌈μ/6⌉, at least 1.
pub fn sturm_bound(n: u64) -> u64 {
    psi(n).div_ceil(6).max(1)
}

pub fn number_of_cusps(n: u64) -> u64 {
    divisors(n).into_iter().map(|d| euler_phi(gcd_u(d, n / d))).sum()
}

fn kronecker_minus(n: u64, d: i64) -> i64 {
    // number of solutions of x² + x + 1 ≡ 0 (d = -3) or x² + 1 ≡ 0 (d = -4) mod N
    if n == 1 {
        return 1;
    }
    let mut count = 1i64;
    for (p, e) in factor_u64(n) {
        let local = match d {
            -4 => {
                if p == 2 {
                    if e == 1 {
                        1
                    } else {
                        0
                    }
                } else if p % 4 == 1 {
                    2
                } else {
                    0
                }
            }
            _ => {
                if p == 3 {
                    if e == 1 {
                        1
                    } else {
                        0
                    }
                } else if p % 3 == 1 {
                    2
                } else {
                    0
                }
            }
        };
        count *= local;
    }
    count
}

/// Genus of X₀(N) by the classical formula.
pub fn genus_x0(n: u64) -> u64 {
    let mu = psi(n) as i64;
    let e2 = kronecker_minus(n, -4);
    let e3 = kronecker_minus(n, -3);
    let c = number_of_cusps(n) as i64;
    let twelve_g = 12 + mu - 3 * e2 - 4 * e3 - 6 * c;
    debug_assert!(twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Largest integer a with a² ≤ 4ℓ, i.e. the Hasse bound ⌊2√ℓ⌋.
pub fn hasse_bound(l: u64) -> i64 {
    isqrt(4 * l) as i64
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let r = modvis_linalg::factor::powmod(a, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        -1
    }
}

/// p-adic valuation of a nonzero BigInt.
pub fn big_valuation(n: &num_bigint::BigInt, p: u64) -> u32 {
    use num_integer::Integer;
    use num_traits::Zero;
    if n.is_zero() {
        return u32::MAX;
    }
    let bp = num_bigint::BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_sturm() {
        assert_eq!(psi(11), 12);
        assert_eq!(psi(1), 1);
        assert_eq!(psi(12), 24);
        assert_eq!(sturm_bound(11), 2);
        assert_eq!(sturm_bound(1), 1);
        assert_eq!(sturm_bound(37), 7);
    }

    #[test]
    fn genus_values() {
        // genus table for small levels
        let expected = [
            (1, 0),
            (11, 1),
            (22, 2),
            (23, 2),
            (25, 0),
            (36, 1),
            (37, 2),
            (49, 1),
            (64, 3),
            (100, 7),
            (389, 32),
        ];
        for (n, g) in expected {
            assert_eq!(genus_x0(n), g, "N = {n}");
        }
    }

    #[test]
    fn cusp_counts() {
        assert_eq!(number_of_cusps(11), 2);
        assert_eq!(number_of_cusps(36), 12);
        assert_eq!(number_of_cusps(1), 1);
    }

    #[test]
    fn xgcd_identity() {
        for a in -20..20 {
            for b in -20..20 {
                let (g, x, y) = xgcd(a, b);
                assert_eq!(a * x + b * y, g);
                assert_eq!(g, gcd(a, b));
            }
        }
    }

    #[test]
    fn legendre_small() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(14, 7), 0);
    }
}

//! Rational torsion by Lutz–Nagell on the short model, and point counts over prime fields.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::weierstrass::Weierstrass;
use crate::arith::{big_valuation, gcd_u, legendre, primes_up_to};
use crate::error::{Error, Result};
use modvis_linalg::factor::factor_big;
use modvis_linalg::modp::reduce_big;

/// #Ẽ(𝔽_ℓ) for a model with good reduction at ℓ.
pub fn count_points(model: &Weierstrass, l: u64) -> Result<u64> {
    if reduce_big(&model.discriminant(), l) == 0 {
        return Err(Error::BadReduction(l));
    }
    let [a1, a2, a3, a4, a6] = model.reduce(l).map(|x| x as u128);
    let lm = l as u128;
    if l == 2 {
        let mut count = 1;
        for x in 0..2u128 {
            for y in 0..2u128 {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs + rhs) % 2 == 0 {
                    count += 1;
                }
            }
        }
        return Ok(count);
    }
    // (2y + a₁x + a₃)² = 4x³ + b₂x² + 2b₄x + b₆
    let b2 = (a1 * a1 + 4 * a2) % lm;
    let b4 = (a1 * a3 + 2 * a4) % lm;
    let b6 = (a3 * a3 + 4 * a6) % lm;
    let mut count: i64 = 1;
    for x in 0..lm {
        let v = ((4 * x % lm * x % lm * x) % lm + b2 * x % lm * x % lm + 2 * b4 * x % lm + b6) % lm;
        count += 1 + legendre(v as i64, l);
    }
    Ok(count as u64)
}

/// a_ℓ = ℓ + 1 − #Ẽ(𝔽_ℓ).
pub fn trace_of_frobenius(model: &Weierstrass, l: u64) -> Result<i64> {
    Ok(l as i64 + 1 - count_points(model, l)? as i64)
}

type Point = Option<(BigRational, BigRational)>;

/// Addition on Y² = X³ + aX + b (b does not enter the formulas).
fn add(a: &BigRational, p: &Point, q: &Point) -> Point {
    match (p, q) {
        (None, _) => q.clone(),
        (_, None) => p.clone(),
        (Some((x1, y1)), Some((x2, y2))) => {
            let lambda = if x1 == x2 {
                if (y1 + y2).is_zero() {
                    return None;
                }
                let three = BigRational::from_integer(3.into());
                (three * x1 * x1 + a) / (BigRational::from_integer(2.into()) * y1)
            } else {
                (y2 - y1) / (x2 - x1)
            };
            let x3 = &lambda * &lambda - x1 - x2;
            let y3 = &lambda * (x1 - &x3) - y1;
            Some((x3, y3))
        }
    }
}

/// Order of a point on Y² = X³ + aX + b if it is at most 12, else None.
fn small_order(a: &BigInt, x: &BigInt, y: &BigInt) -> Option<u64> {
    let a = BigRational::from_integer(a.clone());
    let p: Point = Some((BigRational::from_integer(x.clone()), BigRational::from_integer(y.clone())));
    let mut q = p.clone();
    for k in 1..=12u64 {
        if q.is_none() {
            return Some(k);
        }
        if let Some((qx, qy)) = &q {
            // torsion points are integral
            if !qx.is_integer() || !qy.is_integer() {
                return None;
            }
        }
        q = add(&a, &q, &p);
    }
    None
}

/// Integer roots of X³ + aX + c.
fn integer_roots_cubic(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + a * x + c;
    let af = a.to_f64().unwrap_or(f64::MAX);
    let cf = c.to_f64().unwrap_or(f64::MAX);
    let g = |x: f64| x * x * x + af * x + cf;
    // bracket the real roots between the critical points
    let mut points = vec![];
    if af < 0.0 {
        let s = (-af / 3.0).sqrt();
        points.push(-s);
        points.push(s);
    }
    let bound = 2.0 + af.abs().sqrt() + cf.abs().cbrt();
    let mut edges = vec![-bound];
    edges.extend(points);
    edges.push(bound);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        if g(lo).signum() == g(hi).signum() && g(lo) != 0.0 && g(hi) != 0.0 {
            // a double root sits at a critical point
            for &e in w {
                let guess = BigInt::from(e.round() as i64);
                for d in -2..=2 {
                    let x = &guess + d;
                    if f(&x).is_zero() {
                        out.push(x);
                    }
                }
            }
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo).signum() == g(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let guess = BigInt::from(lo.round() as i64);
        for d in -2..=2 {
            let x = &guess + d;
            if f(&x).is_zero() {
                out.push(x);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Nonnegative y with y² dividing n.
fn square_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let (primes, rest) = factor_big(n);
    if rest > BigInt::from(1) {
        return Err(Error::Internal(format!("could not factor {n}")));
    }
    let mut out = vec![BigInt::from(1)];
    for p in primes {
        let pu = p.to_u64().expect("small prime");
        let e = big_valuation(n, pu) / 2;
        let cur = out.clone();
        let mut pk = BigInt::from(1);
        for _ in 0..e {
            pk *= &p;
            out.extend(cur.iter().map(|x| x * &pk));
        }
    }
    Ok(out)
}

/// Bound on the torsion order: gcd of #Ẽ(𝔽_q) over the first `count` odd primes of good reduction.
pub fn torsion_bound(model: &Weierstrass, count: usize) -> u64 {
    let disc = model.discriminant();
    let mut g = 0u64;
    let mut used = 0;
    for q in primes_up_to(10_000) {
        if q == 2 || reduce_big(&disc, q) == 0 {
            continue;
        }
        g = gcd_u(g, count_points(model, q).expect("good prime"));
        used += 1;
        if used == count {
            break;
        }
    }
    g
}

/// |E(ℚ)_tors|.
pub fn torsion_order(model: &Weierstrass) -> Result<u64> {
    if model.is_singular() {
        return Err(Error::SingularCurve);
    }
    let (a, b) = model.short_model();
    let d = (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b).abs();
    let mut count = 1u64;
    let mut ys = vec![BigInt::zero()];
    ys.extend(square_divisors(&d)?);
    for y in ys {
        let c = &b - &y * &y;
        for x in integer_roots_cubic(&a, &c) {
            if small_order(&a, &x, &y).is_some() {
                count += if y.is_zero() { 1 } else { 2 };
            }
        }
    }
    let bound = torsion_bound(model, 5);
    if bound % count != 0 {
        return Err(Error::Internal(format!("torsion order {count} does not divide the reduction bound {bound}")));
    }
    Ok(count)
}

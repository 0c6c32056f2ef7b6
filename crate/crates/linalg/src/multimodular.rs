//! Rational kernels and solutions by reduction modulo many primes, CRT,
//! rational reconstruction and exact verification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{LinalgError, Result};
use crate::factor::large_primes;
use crate::matrix::IntegerMatrix;
use crate::modp::ModMatrix;

const MAX_PRIMES: usize = 400;

/// Rational reconstruction of `a` modulo `m` with balanced bounds.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let a = a.mod_floor(m);
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

struct Crt {
    modulus: BigInt,
    residues: Vec<BigInt>,
}

impl Crt {
    fn new(len: usize) -> Self {
        Self { modulus: BigInt::one(), residues: vec![BigInt::zero(); len] }
    }

    fn add(&mut self, p: u64, vals: &[u64]) {
        let bp = BigInt::from(p);
        let inv = crate::modp::inv_mod(crate::modp::reduce_big(&self.modulus, p), p);
        for (r, &v) in self.residues.iter_mut().zip(vals) {
            let rp = crate::modp::reduce_big(r, p);
            let diff = (v + p - rp) % p;
            let t = crate::factor::mulmod(diff, inv, p);
            if t != 0 {
                *r += &self.modulus * BigInt::from(t);
            }
        }
        self.modulus *= bp;
    }

    fn reconstruct(&self) -> Option<Vec<BigRational>> {
        let mut out = Vec::with_capacity(self.residues.len());
        for r in &self.residues {
            if r.is_zero() {
                out.push(BigRational::zero());
                continue;
            }
            out.push(rational_reconstruct(r, &self.modulus)?);
        }
        Some(out)
    }
}

/// Clears denominators of a rational vector, returning a primitive integer vector.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn is_left_null(v: &[BigInt], a: &IntegerMatrix) -> bool {
    a.vec_mul(v).iter().all(|x| x.is_zero())
}

fn should_try(k: usize) -> bool {
    k <= 4 || k.is_power_of_two() || k % 8 == 0
}

/// Rational basis of the left kernel {x : x·A = 0}, as primitive integer vectors.
/// The basis is the canonical echelon basis of the rational kernel (free coordinates
/// form an identity block) scaled to integral primitive vectors.
pub fn left_kernel_rational(a: &IntegerMatrix) -> Result<Vec<Vec<BigInt>>> {
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    if a.cols() == 0 || a.is_zero() {
        return Ok((0..n)
            .map(|i| {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::one();
                v
            })
            .collect());
    }
    let at = a.transpose();
    let primes = large_primes(MAX_PRIMES);
    let mut best: Option<(Vec<usize>, Crt)> = None;
    let mut used = 0;
    for &p in &primes {
        let mut m = ModMatrix::from_integer(&at, p);
        let pivots = m.rref();
        let free: Vec<usize> = {
            let mut is_p = vec![false; n];
            for &c in &pivots {
                is_p[c] = true;
            }
            (0..n).filter(|&c| !is_p[c]).collect()
        };
        if free.is_empty() {
            return Ok(vec![]);
        }
        let vals: Vec<u64> = (0..pivots.len()).flat_map(|i| free.iter().map(move |&f| (i, f))).map(|(i, f)| m.data[i * n + f]).collect();
        match &mut best {
            Some((bp, crt)) => {
                if pivots.len() > bp.len() || (pivots.len() == bp.len() && pivots < *bp) {
                    let mut c = Crt::new(vals.len());
                    c.add(p, &vals);
                    best = Some((pivots, c));
                    used = 1;
                } else if pivots == *bp {
                    crt.add(p, &vals);
                    used += 1;
                } else {
                    continue;
                }
            }
            None => {
                let mut c = Crt::new(vals.len());
                c.add(p, &vals);
                best = Some((pivots, c));
                used = 1;
            }
        }
        if !should_try(used) {
            continue;
        }
        let (pivots, crt) = best.as_ref().unwrap();
        let Some(entries) = crt.reconstruct() else { continue };
        let mut is_p = vec![false; n];
        for &c in pivots {
            is_p[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_p[c]).collect();
        let nf = free.len();
        let mut basis = Vec::with_capacity(nf);
        let mut ok = true;
        for (fi, &f) in free.iter().enumerate() {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -entries[i * nf + fi].clone();
            }
            let iv = primitive_integer_vector(&v);
            if !is_left_null(&iv, a) {
                ok = false;
                break;
            }
            basis.push(iv);
        }
        if ok {
            return Ok(basis);
        }
    }
    Err(LinalgError::NoConvergence)
}

/// Right kernel {y : A·y = 0} as primitive integer column vectors.
pub fn right_kernel_rational(a: &IntegerMatrix) -> Result<Vec<Vec<BigInt>>> {
    left_kernel_rational(&a.transpose())
}

/// Solves X·A = B exactly for X, where A has full row rank and the solution exists.
pub fn solve_left_rational(a: &IntegerMatrix, b: &IntegerMatrix) -> Result<Vec<Vec<BigRational>>> {
    if a.cols() != b.cols() {
        return Err(LinalgError::Shape("solve: column counts differ".into()));
    }
    let r = a.rows();
    let k = b.rows();
    if k == 0 {
        return Ok(vec![]);
    }
    if r == 0 {
        return if b.is_zero() { Ok(vec![vec![]; k]) } else { Err(LinalgError::Singular) };
    }
    let primes = large_primes(MAX_PRIMES);
    let mut crt = Crt::new(r * k);
    let mut used = 0;
    let mut failures = 0;
    for &p in &primes {
        let am = ModMatrix::from_integer(a, p);
        let bm = ModMatrix::from_integer(b, p);
        let rows: Vec<Vec<u64>> = (0..k).map(|i| bm.row(i).to_vec()).collect();
        let Some(sol) = am.solve_left_general(&rows) else {
            failures += 1;
            if failures > 3 && used == 0 {
                return Err(LinalgError::Singular);
            }
            continue;
        };
        let vals: Vec<u64> = sol.into_iter().flatten().collect();
        crt.add(p, &vals);
        used += 1;
        if !should_try(used) {
            continue;
        }
        let Some(x) = crt.reconstruct() else { continue };
        let rows: Vec<Vec<BigRational>> = x.chunks(r).map(|c| c.to_vec()).collect();
        if verify_solution(a, b, &rows) {
            return Ok(rows);
        }
    }
    Err(LinalgError::NoConvergence)
}

fn verify_solution(a: &IntegerMatrix, b: &IntegerMatrix, x: &[Vec<BigRational>]) -> bool {
    for (i, row) in x.iter().enumerate() {
        let mut den = BigInt::one();
        for v in row {
            den = den.lcm(v.denom());
        }
        let ints: Vec<BigInt> = row.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        let lhs = a.vec_mul(&ints);
        if lhs.iter().zip(b.row(i)).any(|(l, r)| *l != r * &den) {
            return false;
        }
    }
    true
}

/// Rank over ℚ, certified by agreement at two primes (rank can only drop modulo p).
pub fn rank_rational(a: &IntegerMatrix) -> usize {
    let primes = large_primes(3);
    primes.iter().map(|&p| ModMatrix::from_integer(a, p).rank()).max().unwrap_or(0)
}

/// Exact rational inverse-free solve for a single vector: x·A = b.
pub fn solve_vector(a: &IntegerMatrix, b: &[BigInt]) -> Result<Vec<BigRational>> {
    let bm = IntegerMatrix::new(1, b.len(), b.to_vec())?;
    Ok(solve_left_rational(a, &bm)?.remove(0))
}

pub fn rational_is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn to_integers(v: &[BigRational]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

pub fn abs_rational(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_i64_rows(rows[0].len(), rows)
    }

    #[test]
    fn reconstruct_small_fraction() {
        let md = BigInt::from(1_000_000_007u64);
        let inv3 = BigInt::from(333_333_336u64);
        let r = rational_reconstruct(&(BigInt::from(2) * inv3), &md).unwrap();
        assert_eq!(r, BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn left_kernel_with_fractions() {
        let a = m(&[vec![3, 0], vec![0, 3], vec![1, 1], vec![2, 5]]);
        let k = left_kernel_rational(&a).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.vec_mul(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_with_rational_answer() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let b = m(&[vec![1, 1]]);
        let x = solve_left_rational(&a, &b).unwrap();
        assert_eq!(x[0], vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into())]);
    }

    #[test]
    fn large_entries_need_several_primes() {
        let big = BigInt::from(10).pow(40u32) + BigInt::from(7);
        let a = IntegerMatrix::new(2, 2, vec![big.clone(), BigInt::one(), BigInt::from(3), BigInt::from(5)]).unwrap();
        let b = IntegerMatrix::new(1, 2, vec![BigInt::one(), BigInt::zero()]).unwrap();
        let x = solve_left_rational(&a, &b).unwrap();
        assert!(verify_solution(&a, &b, &x));
    }
}

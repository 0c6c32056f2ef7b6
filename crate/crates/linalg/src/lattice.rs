use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, Result};
use crate::factor::factor_big;
use crate::hnf::{hnf_rows, pivot_columns};
use crate::matrix::{bareiss_det, IntegerMatrix};
use crate::modp::ModMatrix;
use crate::multimodular::left_kernel_rational;
use crate::snf::invariant_factors;

/// A finitely generated subgroup of ℤⁿ stored by its canonical row HNF basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerLattice {
    ambient_rank: usize,
    basis: IntegerMatrix,
}

impl std::fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntegerLattice(ambient {}, {:?})", self.ambient_rank, self.basis)
    }
}

impl IntegerLattice {
    pub fn from_generators(ambient_rank: usize, gens: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.len() != ambient_rank) {
            return Err(LinalgError::AmbientMismatch(ambient_rank, g.len()));
        }
        let rows = hnf_rows(gens, ambient_rank);
        Ok(Self { ambient_rank, basis: IntegerMatrix::from_rows(ambient_rank, rows)? })
    }

    pub fn from_i64_generators(ambient_rank: usize, gens: &[Vec<i64>]) -> Self {
        Self::from_generators(ambient_rank, gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("generator length")
    }

    pub fn from_matrix_rows(m: &IntegerMatrix) -> Self {
        Self::from_generators(m.cols(), m.row_vecs()).expect("shape")
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self { ambient_rank, basis: IntegerMatrix::zeros(0, ambient_rank) }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self { ambient_rank, basis: IntegerMatrix::identity(ambient_rank) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    fn pivots(&self) -> Vec<usize> {
        pivot_columns(&self.basis_rows())
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient_rank != other.ambient_rank {
            return Err(LinalgError::AmbientMismatch(self.ambient_rank, other.ambient_rank));
        }
        Ok(())
    }

    /// Rational coordinates of `v` in the stored basis, or None when `v` lies outside the ℚ-span.
    pub fn rational_coordinates(&self, v: &[BigInt]) -> Option<Vec<BigRational>> {
        let piv = self.pivots();
        let k = self.rank();
        let mut c: Vec<BigRational> = Vec::with_capacity(k);
        for (i, &p) in piv.iter().enumerate() {
            let mut acc = BigRational::from_integer(v[p].clone());
            for (j, cj) in c.iter().enumerate() {
                let h = self.basis.get(j, p);
                if !h.is_zero() {
                    acc -= cj * BigRational::from_integer(h.clone());
                }
            }
            c.push(acc / BigRational::from_integer(self.basis.get(i, p).clone()));
        }
        let mut den = BigInt::one();
        for x in &c {
            den = den.lcm(x.denom());
        }
        let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        let back = self.basis.vec_mul(&ints);
        if back.iter().zip(v).any(|(b, x)| *b != x * &den) {
            return None;
        }
        Some(c)
    }

    /// Integer coordinates of `v`, or None when `v` is not in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.rational_coordinates(v)?;
        c.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.ambient_rank && self.coordinates(v).is_some()
    }

    pub fn is_sublattice_of(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.basis_rows().iter().all(|r| other.contains(r))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_generators(self.ambient_rank, self.basis.scale(c).row_vecs()).expect("shape")
    }

    /// Divides every vector by `c`; None unless every basis entry is divisible.
    pub fn divide_exact(&self, c: &BigInt) -> Option<Self> {
        if self.basis.entries().iter().any(|x| !x.is_multiple_of(c)) {
            return None;
        }
        let rows = self.basis_rows().into_iter().map(|r| r.into_iter().map(|x| x / c).collect()).collect();
        Some(Self::from_generators(self.ambient_rank, rows).expect("shape"))
    }

    /// Image under x ↦ x·M.
    pub fn image(&self, m: &IntegerMatrix) -> Result<Self> {
        if m.rows() != self.ambient_rank {
            return Err(LinalgError::AmbientMismatch(self.ambient_rank, m.rows()));
        }
        let img = self.basis.mul(m)?;
        Self::from_generators(m.cols(), img.row_vecs())
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }

    pub fn saturate(&self) -> Self {
        if self.rank() == 0 {
            return self.clone();
        }
        let piv = self.pivots();
        let mut primes: Vec<BigInt> = Vec::new();
        for (i, &p) in piv.iter().enumerate() {
            let h = self.basis.get(i, p);
            if h.is_one() {
                continue;
            }
            let (ps, rest) = factor_big(h);
            primes.extend(ps);
            if !rest.is_one() {
                primes.push(rest);
            }
        }
        primes.sort();
        primes.dedup();
        let mut rows = self.basis_rows();
        let mut queue = primes;
        while let Some(p) = queue.pop() {
            match saturate_at(rows.clone(), self.ambient_rank, &p) {
                Ok(r) => rows = r,
                Err(d) => {
                    queue.push(d.clone());
                    queue.push(&p / &d);
                }
            }
        }
        Self::from_generators(self.ambient_rank, rows).expect("shape")
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut gens = self.basis_rows();
        gens.extend(other.basis_rows());
        Self::from_generators(self.ambient_rank, gens)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if self.rank() == 0 || other.rank() == 0 {
            return Ok(Self::zero(self.ambient_rank));
        }
        let k1 = self.rank();
        let stacked = IntegerMatrix::vstack(&[&self.basis, &other.basis.scale(&-BigInt::one())])?;
        let kernel = left_kernel_integer(&stacked)?;
        let gens: Vec<Vec<BigInt>> = kernel.basis_rows().into_iter().map(|v| self.basis.vec_mul(&v[..k1])).collect();
        Self::from_generators(self.ambient_rank, gens)
    }

    /// Vectors of the lattice fixed by x ↦ x·M.
    pub fn fixed_by(&self, m: &IntegerMatrix) -> Result<Self> {
        let n = self.ambient_rank;
        if m.rows() != n || m.cols() != n {
            return Err(LinalgError::Shape("operator must be square on the ambient space".into()));
        }
        let diff = self.basis.mul(&m.sub(&IntegerMatrix::identity(n))?)?;
        let kernel = left_kernel_integer(&diff)?;
        let gens = kernel.basis_rows().into_iter().map(|c| self.basis.vec_mul(&c)).collect();
        Self::from_generators(n, gens)
    }
}

/// Integer left kernel {x ∈ ℤʳ : x·A = 0}, saturated.
pub fn left_kernel_integer(a: &IntegerMatrix) -> Result<IntegerLattice> {
    let gens = left_kernel_rational(a)?;
    Ok(IntegerLattice::from_generators(a.rows(), gens)?.saturate())
}

/// Saturates the lattice spanned by echelon `rows` at the modulus `m`, which is treated as prime.
/// Err(d) returns a proper divisor of `m` found while eliminating.
fn saturate_at(mut rows: Vec<Vec<BigInt>>, ncols: usize, m: &BigInt) -> std::result::Result<Vec<Vec<BigInt>>, BigInt> {
    loop {
        let kernel = match m.to_u64().filter(|&x| x < 1u64 << 62) {
            Some(p) => {
                let im = IntegerMatrix::from_rows(ncols, rows.clone()).expect("shape");
                ModMatrix::from_integer(&im, p)
                    .left_kernel()
                    .into_iter()
                    .map(|v| v.into_iter().map(BigInt::from).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            }
            None => left_kernel_mod_big(&rows, ncols, m)?,
        };
        if kernel.is_empty() {
            return Ok(rows);
        }
        let mut replace: Vec<(usize, Vec<BigInt>)> = Vec::new();
        for (s_idx, c) in kernel.iter().enumerate() {
            let f = (0..c.len())
                .find(|&i| c[i].is_one() && kernel.iter().enumerate().all(|(t, o)| t == s_idx || o[i].is_zero()))
                .expect("canonical kernel basis");
            let mut w = vec![BigInt::zero(); ncols];
            for (j, cj) in c.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                for (x, y) in w.iter_mut().zip(&rows[j]) {
                    *x += cj * y;
                }
            }
            for x in w.iter_mut() {
                debug_assert!(x.is_multiple_of(m));
                *x = &*x / m;
            }
            replace.push((f, w));
        }
        for (f, w) in replace {
            rows[f] = w;
        }
        rows = hnf_rows(rows, ncols);
    }
}

/// Left kernel modulo a (presumed prime) large modulus using BigInt arithmetic.
fn left_kernel_mod_big(rows: &[Vec<BigInt>], ncols: usize, m: &BigInt) -> std::result::Result<Vec<Vec<BigInt>>, BigInt> {
    let k = rows.len();
    // columns of the transpose: a is ncols × k
    let mut a: Vec<Vec<BigInt>> = (0..ncols).map(|j| (0..k).map(|i| rows[i][j].mod_floor(m)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(pr) = (r..ncols).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(pr, r);
        let g = a[r][c].gcd(m);
        if !g.is_one() {
            return Err(g);
        }
        let inv = a[r][c].extended_gcd(m).x.mod_floor(m);
        for x in a[r].iter_mut() {
            *x = (&*x * &inv).mod_floor(m);
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = (&*x - &f * y).mod_floor(m);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for f in (0..k).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigInt::zero(); k];
        v[f] = BigInt::one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = (-&a[i][f]).mod_floor(m);
        }
        out.push(v);
    }
    Ok(out)
}

pub fn lattice_sum(l1: &IntegerLattice, l2: &IntegerLattice) -> Result<IntegerLattice> {
    l1.sum(l2)
}

pub fn saturate(l: &IntegerLattice) -> IntegerLattice {
    l.saturate()
}

/// |det T| for the change of basis T carrying a basis of `l1` to a basis of `l2`.
pub fn generalized_index(l1: &IntegerLattice, l2: &IntegerLattice) -> Result<BigRational> {
    l1.check_ambient(l2)?;
    if l1.rank() != l2.rank() {
        return Err(LinalgError::SpanMismatch);
    }
    let mut rows = Vec::with_capacity(l2.rank());
    let mut den = BigInt::one();
    for v in l2.basis_rows() {
        let c = l1.rational_coordinates(&v).ok_or(LinalgError::SpanMismatch)?;
        let mut d = BigInt::one();
        for x in &c {
            d = d.lcm(x.denom());
        }
        rows.push(c.iter().map(|x| x.numer() * (&d / x.denom())).collect::<Vec<_>>());
        den *= d;
    }
    let det = bareiss_det(rows);
    if det.is_zero() {
        return Err(LinalgError::SpanMismatch);
    }
    Ok(BigRational::new(det.abs(), den))
}

/// Elementary divisors (> 1) of `big / small`; empty when the quotient is trivial.
pub fn quotient_invariants(big: &IntegerLattice, small: &IntegerLattice) -> Result<Vec<BigInt>> {
    big.check_ambient(small)?;
    let mut coords = Vec::with_capacity(small.rank());
    for v in small.basis_rows() {
        coords.push(big.coordinates(&v).ok_or(LinalgError::NotASublattice)?);
    }
    if small.rank() < big.rank() {
        return Err(LinalgError::InfiniteQuotient { big: big.rank(), small: small.rank() });
    }
    if big.rank() == 0 {
        return Ok(vec![]);
    }
    let m = IntegerMatrix::from_rows(big.rank(), coords)?;
    Ok(invariant_factors(&m).into_iter().filter(|d| !d.is_one()).collect())
}

/// Order of the finite quotient `big / small`.
pub fn quotient_order(big: &IntegerLattice, small: &IntegerLattice) -> Result<BigInt> {
    Ok(quotient_invariants(big, small)?.into_iter().product())
}

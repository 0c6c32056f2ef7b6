//! Dense linear algebra over a prime field 𝔽_p with p < 2^63.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::factor::{mulmod, powmod};
use crate::matrix::IntegerMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

pub fn reduce_big(x: &BigInt, p: u64) -> u64 {
    if let Some(v) = x.to_i64() {
        return v.rem_euclid(p as i64) as u64;
    }
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

pub fn reduce_i64(x: i64, p: u64) -> u64 {
    (x as i128).rem_euclid(p as i128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Symmetric lift of a residue to (-p/2, p/2].
pub fn lift_symmetric(a: u64, p: u64) -> i128 {
    if a > p / 2 {
        a as i128 - p as i128
    } else {
        a as i128
    }
}

impl ModMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        Self { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_integer(m: &IntegerMatrix, p: u64) -> Self {
        Self { p, rows: m.rows(), cols: m.cols(), data: m.entries().iter().map(|x| reduce_big(x, p)).collect() }
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64], p: u64) -> Self {
        Self { p, rows, cols, data: data.iter().map(|&x| reduce_i64(x, p)).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape");
        let p = self.p;
        let mut out = Self::zeros(p, self.rows, other.cols);
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut pending = 0u32;
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for (o, &b) in acc.iter_mut().zip(other.row(k)) {
                    *o += a as u128 * b as u128;
                }
                pending += 1;
                if pending == 60 {
                    acc.iter_mut().for_each(|x| *x %= p as u128);
                    pending = 0;
                }
            }
            for (j, x) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (x % p as u128) as u64;
            }
        }
        out
    }

    pub fn vec_mul(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut acc = vec![0u128; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in acc.iter_mut().zip(self.row(i)) {
                *o = (*o + a as u128 * b as u128) % p as u128;
            }
        }
        acc.into_iter().map(|x| x as u64).collect()
    }

    /// Returns `self - c·I`.
    pub fn sub_scalar(&self, c: u64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let x = &mut m.data[i * self.cols + i];
            *x = (*x + self.p - c % self.p) % self.p;
        }
        m
    }

    pub fn hstack(blocks: &[&Self]) -> Self {
        let p = blocks[0].p;
        let rows = blocks[0].rows;
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Self { p, rows, cols, data }
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else { continue };
            if piv != r {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.data[r * cols + c], p);
            for j in c..cols {
                let x = &mut self.data[r * cols + j];
                *x = mulmod(*x, inv, p);
            }
            let pivot_row: Vec<u64> = self.data[r * cols + c..(r + 1) * cols].to_vec();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * cols + c];
                if f == 0 {
                    continue;
                }
                let nf = p - f;
                for (k, &y) in pivot_row.iter().enumerate() {
                    if y != 0 {
                        let x = &mut self.data[i * cols + c + k];
                        *x = ((*x as u128 + nf as u128 * y as u128) % p as u128) as u64;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of {x : self·x = 0} in canonical form: one vector per free column,
    /// with a 1 in that column and 0 in the other free columns.
    pub fn right_kernel(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.cols];
            v[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                let x = m.data[i * self.cols + f];
                v[c] = if x == 0 { 0 } else { p - x };
            }
            out.push(v);
        }
        out
    }

    /// Basis of {x : x·self = 0}.
    pub fn left_kernel(&self) -> Vec<Vec<u64>> {
        self.transpose().right_kernel()
    }

    /// Solves x·self = b for square invertible self.
    pub fn solve_left(&self, b: &[u64]) -> Option<Vec<u64>> {
        let sol = self.solve_left_many(&[b.to_vec()])?;
        sol.into_iter().next()
    }

    /// Solves X·self = B row by row; None if self is singular.
    pub fn solve_left_many(&self, bs: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
        assert_eq!(self.rows, self.cols, "square matrix expected");
        let n = self.rows;
        let k = bs.len();
        // self^T · X^T = B^T
        let t = self.transpose();
        let mut aug = Self::zeros(self.p, n, n + k);
        for i in 0..n {
            aug.data[i * (n + k)..i * (n + k) + n].copy_from_slice(t.row(i));
            for (j, b) in bs.iter().enumerate() {
                aug.data[i * (n + k) + n + j] = b[i] % self.p;
            }
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some((0..k).map(|j| (0..n).map(|i| aug.data[i * (n + k) + n + j]).collect()).collect())
    }

    /// Solves X·self = B for a full-row-rank self (X unique); None if inconsistent or not unique.
    pub fn solve_left_general(&self, bs: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
        let p = self.p;
        let (r, c) = (self.rows, self.cols);
        let k = bs.len();
        // self^T (c×r) · x^T = b^T
        let t = self.transpose();
        let mut aug = Self::zeros(p, c, r + k);
        for i in 0..c {
            aug.data[i * (r + k)..i * (r + k) + r].copy_from_slice(t.row(i));
            for (j, b) in bs.iter().enumerate() {
                aug.data[i * (r + k) + r + j] = b[i] % p;
            }
        }
        let piv = aug.rref();
        if piv.len() != r || piv.iter().any(|&x| x >= r) {
            return None;
        }
        Some((0..k).map(|j| (0..r).map(|i| aug.data[i * (r + k) + r + j]).collect()).collect())
    }

    /// Restriction of an operator (acting on rows) to an invariant subspace with basis rows `basis`.
    pub fn restrict(&self, basis: &[Vec<u64>]) -> Option<Self> {
        let b = Self::from_rows(self.p, self.rows, basis);
        let images: Vec<Vec<u64>> = basis.iter().map(|v| self.vec_mul(v)).collect();
        let coords = b.solve_left_general(&images)?;
        Some(Self::from_rows(self.p, basis.len(), &coords))
    }

    pub fn from_rows(p: u64, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Self { p, rows: rows.len(), cols, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 1_000_000_007;

    #[test]
    fn kernel_of_rank_one() {
        let m = ModMatrix::from_i64(2, 3, &[1, 2, 3, 2, 4, 6], P);
        assert_eq!(m.rank(), 1);
        let k = m.right_kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            let mt = m.transpose();
            assert!(mt.vec_mul(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_recovers_vector() {
        let a = ModMatrix::from_i64(2, 2, &[2, 1, 1, 1], P);
        let x = vec![3u64, 5];
        let b = a.vec_mul(&x);
        assert_eq!(a.solve_left(&b).unwrap(), x);
        let s = ModMatrix::from_i64(2, 2, &[1, 1, 1, 1], P);
        assert!(s.solve_left(&b).is_none());
    }

    #[test]
    fn restriction_to_eigenline() {
        let t = ModMatrix::from_i64(2, 2, &[2, 0, 0, 3], P);
        let r = t.restrict(&[vec![0, 1]]).unwrap();
        assert_eq!(r.data, vec![3]);
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntegerMatrix;

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }

    // row_i -= q row_j
    fn row_op(&mut self, i: usize, j: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[j].clone();
            for (t, s) in m[i].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *t -= q * s;
                }
            }
        }
    }

    // col_i -= q col_j
    fn col_op(&mut self, i: usize, j: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for r in m.iter_mut() {
                if !r[j].is_zero() {
                    let d = q * &r[j];
                    r[i] -= d;
                }
            }
        }
    }
}

fn to_matrix(rows: Vec<Vec<BigInt>>, cols: usize) -> IntegerMatrix {
    IntegerMatrix::from_rows(cols, rows).expect("shape")
}

/// Smith normal form: returns (D, U, V) with U·M·V = D, U and V unimodular,
/// D diagonal with nonnegative entries d₁ | d₂ | ….
pub fn smith_normal_form(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix, IntegerMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.row_vecs(),
        u: IntegerMatrix::identity(rows).row_vecs(),
        v: IntegerMatrix::identity(cols).row_vecs(),
    };
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &w.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < w.a[bi][bj].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(w, rows, cols);
            };
            if bi != t {
                w.swap_rows(bi, t);
            }
            if bj != t {
                w.swap_cols(bj, t);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.row_op(i, t, &q);
                if !w.a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.col_op(j, t, &q);
                if !w.a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = w.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => w.row_op(t, i, &-BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            for m in [&mut w.a, &mut w.u] {
                for x in m[t].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
        }
    }
    finish(w, rows, cols)
}

fn finish(w: Work, rows: usize, cols: usize) -> (IntegerMatrix, IntegerMatrix, IntegerMatrix) {
    (to_matrix(w.a, cols), to_matrix(w.u, rows), to_matrix(w.v, cols))
}

/// Diagonal of the Smith form.
pub fn invariant_factors(m: &IntegerMatrix) -> Vec<BigInt> {
    let (d, _, _) = smith_normal_form(m);
    (0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_i64_rows(rows[0].len(), rows)
    }

    fn check(mat: &IntegerMatrix) -> IntegerMatrix {
        let (d, u, v) = smith_normal_form(mat);
        assert_eq!(u.mul(mat).unwrap().mul(&v).unwrap(), d);
        assert!(u.determinant().unwrap().abs().is_one());
        assert!(v.determinant().unwrap().abs().is_one());
        assert!(d.is_diagonal());
        d
    }

    #[test]
    fn identity_is_fixed() {
        assert_eq!(check(&IntegerMatrix::identity(3)), IntegerMatrix::identity(3));
    }

    #[test]
    fn coprime_diagonal_merges() {
        assert_eq!(check(&m(&[vec![2, 0], vec![0, 3]])), m(&[vec![1, 0], vec![0, 6]]));
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(check(&IntegerMatrix::zeros(2, 2)), IntegerMatrix::zeros(2, 2));
    }

    #[test]
    fn rectangular() {
        let d = check(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(d, m(&[vec![2, 0, 0], vec![0, 6, 0], vec![0, 0, 12]]));
        let d = check(&m(&[vec![4, 6]]));
        assert_eq!(d, m(&[vec![2, 0]]));
    }
}

//! Row-style Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

fn sub_multiple(target: &mut [BigInt], src: &[BigInt], q: &BigInt, from: usize) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target[from..].iter_mut().zip(&src[from..]) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Canonical row HNF of the lattice generated by `rows` (all of length `ncols`).
///
/// Output rows are nonzero, ordered by strictly increasing pivot column, each pivot is
/// positive and every entry above a pivot lies in `[0, pivot)`.
pub fn hnf_rows(rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if !a[i][c].is_zero() && best.is_none_or(|b| a[i][c].magnitude() < a[b][c].magnitude()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let (head, tail) = a.split_at_mut(r + 1);
            let pivot_row = &head[r];
            let mut all_zero = true;
            for row in tail.iter_mut() {
                if row[c].is_zero() {
                    continue;
                }
                let q = row[c].div_floor(&pivot_row[c]);
                sub_multiple(row, pivot_row, &q, c);
                if !row[c].is_zero() {
                    all_zero = false;
                }
            }
            if all_zero {
                break;
            }
        }
        if r == a.len() || a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r][c..].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let (head, tail) = a.split_at_mut(r);
        let pivot_row = &tail[0];
        for row in head.iter_mut() {
            let q = row[c].div_floor(&pivot_row[c]);
            sub_multiple(row, pivot_row, &q, c);
        }
        r += 1;
        a.retain(|row| row.iter().any(|x| !x.is_zero()));
    }
    a.truncate(r);
    a
}

/// Pivot column of each row of an echelon basis.
pub fn pivot_columns(rows: &[Vec<BigInt>]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().position(|x| !x.is_zero()).expect("zero row in echelon basis")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn gcd_of_multiples() {
        assert_eq!(hnf_rows(b(&[&[2, 0], &[3, 0]]), 2), b(&[&[1, 0]]));
    }

    #[test]
    fn reduces_above_pivots() {
        let h = hnf_rows(b(&[&[1, 5], &[0, 3]]), 2);
        assert_eq!(h, b(&[&[1, 2], &[0, 3]]));
    }

    #[test]
    fn canonical_under_row_operations() {
        let h1 = hnf_rows(b(&[&[2, 2, 1], &[0, 4, 3], &[1, 0, 0]]), 3);
        let h2 = hnf_rows(b(&[&[3, 2, 1], &[1, 0, 0], &[2, 6, 4]]), 3);
        assert_eq!(h1, h2);
    }

    #[test]
    fn negative_pivot_is_flipped() {
        assert_eq!(hnf_rows(b(&[&[0, -4, 6]]), 3), b(&[&[0, 4, -6]]));
    }
}

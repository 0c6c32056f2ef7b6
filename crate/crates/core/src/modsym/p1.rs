//! The projective line ℙ¹(ℤ/N).

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, xgcd};

/// A point (c:d) of ℙ¹(ℤ/N), stored as the lexicographically least pair in its unit orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ManinSymbol {
    pub c: u32,
    pub d: u32,
}

#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    symbols: Vec<ManinSymbol>,
    index: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "level must be positive");
        let nn = n as usize;
        let units: Vec<usize> = (1..=nn).filter(|&u| gcd(u as i64, n as i64) == 1).map(|u| u % nn).collect();
        let mut index = vec![NONE; nn * nn];
        let mut symbols = Vec::new();
        for c in 0..nn {
            for d in 0..nn {
                if index[c * nn + d] != NONE || gcd(gcd(c as i64, d as i64), n as i64) != 1 {
                    continue;
                }
                let id = symbols.len() as u32;
                symbols.push(ManinSymbol { c: c as u32, d: d as u32 });
                for &u in &units {
                    index[(u * c % nn) * nn + u * d % nn] = id;
                }
            }
        }
        Self { n, symbols, index }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[ManinSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> ManinSymbol {
        self.symbols[i]
    }

    /// Index of (c:d) for arbitrary integers, or None when gcd(c, d, N) ≠ 1.
    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let c = c.rem_euclid(n) as usize;
        let d = d.rem_euclid(n) as usize;
        let i = self.index[c * self.n as usize + d];
        if i == NONE {
            None
        } else {
            Some(i as usize)
        }
    }

    /// A matrix [[a, b], [c, d]] in SL₂(ℤ) whose bottom row reduces to the symbol.
    pub fn lift(&self, i: usize) -> [i64; 4] {
        lift_to_sl2z(self.symbols[i].c as i64, self.symbols[i].d as i64, self.n as i64)
    }
}

/// Lifts (c, d) with gcd(c, d, N) = 1 to a matrix in SL₂(ℤ) congruent in its bottom row modulo N.
pub fn lift_to_sl2z(c: i64, d: i64, n: i64) -> [i64; 4] {
    if n == 1 {
        return [1, 0, 0, 1];
    }
    let c0 = if c == 0 { n } else { c };
    let mut d1 = d;
    let mut t = 0;
    while gcd(c0, d1) != 1 {
        t += 1;
        d1 = d + t * n;
        assert!(t < 100_000, "no coprime lift of ({c}, {d}) mod {n}");
    }
    let (_, x, y) = xgcd(d1, -c0);
    // a·d1 - b·c0 = 1 with a = x, b = y
    [x, y, c0, d1]
}

/// |ℙ¹(ℤ/N)| = N·∏_{q|N}(1 + 1/q).
pub fn pone_size(n: u64) -> u64 {
    crate::arith::psi(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_index_formula() {
        for n in 1..60 {
            assert_eq!(P1List::new(n).len() as u64, pone_size(n), "N = {n}");
        }
        assert_eq!(pone_size(12), 24);
        assert_eq!(P1List::new(12).len(), 24);
    }

    #[test]
    fn lifts_are_unimodular() {
        for n in [1u64, 6, 11, 12, 36] {
            let p = P1List::new(n);
            for i in 0..p.len() {
                let [a, b, c, d] = p.lift(i);
                assert_eq!(a * d - b * c, 1);
                assert_eq!(p.index_of(c, d), Some(i));
            }
        }
    }

    #[test]
    fn scaling_is_identified() {
        let p = P1List::new(11);
        assert_eq!(p.index_of(3, 5), p.index_of(6, 10));
        assert_eq!(p.index_of(0, 7), p.index_of(0, 1));
        let p = P1List::new(12);
        assert_eq!(p.index_of(2, 4), None);
    }
}

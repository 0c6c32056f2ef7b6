//! Merel's Heilbronn matrices and coset representatives for Hecke operators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Matrices [[a, b], [c, d]] with ad − bc = n, a > b ≥ 0, d > c ≥ 0.
pub fn merel(n: u64) -> Arc<Vec<[i64; 4]>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<[i64; 4]>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    let v = Arc::new(compute_merel(n as i64));
    cache.lock().unwrap().insert(n, v.clone());
    v
}

fn compute_merel(n: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in 1..=n {
        let q = n / a;
        if q * a == n {
            let d = q;
            for b in 0..a {
                out.push([a, b, 0, d]);
            }
            for c in 1..d {
                out.push([a, 0, c, d]);
            }
        }
        for d in (q + 1)..=n {
            let bc = a * d - n;
            // b = bc / c < a forces c > bc / a
            let c_min = bc / a + 1;
            for c in c_min.max(1)..d {
                if bc % c == 0 {
                    let b = bc / c;
                    if b < a && b > 0 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Coset representatives δ for T_ℓ (ℓ ∤ N) acting on the left on cusps.
pub fn hecke_cosets(l: i64, include_infinity_coset: bool) -> Vec<[i64; 4]> {
    let mut v: Vec<[i64; 4]> = (0..l).map(|j| [1, j, 0, l]).collect();
    if include_infinity_coset {
        v.push([l, 0, 0, 1]);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: i64) -> Vec<[i64; 4]> {
        let mut v = Vec::new();
        for a in 1..=n {
            for b in 0..a {
                for d in 1..=n + a * a {
                    for c in 0..d {
                        if a * d - b * c == n {
                            v.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        v.sort();
        v
    }

    #[test]
    fn matches_brute_force() {
        for n in 1..12 {
            let mut m = compute_merel(n);
            m.sort();
            assert_eq!(m, brute(n), "n = {n}");
        }
    }
}

//! Congruences between rational newforms of the same level, and the one-sided test that no
//! other eigenform of level dividing N shares their reduction mod p.

use modvis_linalg::modp::{reduce_i64, ModMatrix};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u, is_prime_u64, primes_up_to, valuation};
use crate::error::{Error, Result};
use crate::modsym::ModSymSpace;
use crate::newform::RationalNewform;

pub use crate::arith::sturm_bound;

/// Default multiplier applied to the Sturm bound when certifying r.
pub const DEFAULT_SAFETY: u64 = 3;

#[derive(Clone, Debug)]
pub struct CongruentPair {
    /// Analytic rank zero.
    pub f: RationalNewform,
    /// Positive analytic rank.
    pub g: RationalNewform,
    pub p: u64,
    pub r: u64,
    pub index_bound: u64,
    pub safety: u64,
}

impl CongruentPair {
    pub fn exponent(&self) -> u32 {
        valuation(self.r, self.p)
    }

    pub fn level(&self) -> u64 {
        self.f.level()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    ProvedExcluded,
    PossibleCongruence,
}

/// gcd of a_ℓ(f) − a_ℓ(g) over primes ℓ ≤ bound with ℓ ∤ N·p (0 when they all agree).
pub fn difference_gcd(f: &RationalNewform, g: &RationalNewform, p: u64, bound: u64) -> Result<u64> {
    let n = f.level();
    let mut acc = 0u64;
    for l in primes_up_to(bound) {
        if n % l == 0 || l == p {
            continue;
        }
        let d = (f.eigenvalue(l)? - g.eigenvalue(l)?).unsigned_abs();
        acc = gcd_u(acc, d);
    }
    Ok(acc)
}

/// Largest power of p dividing every a_ℓ(f) − a_ℓ(g) with ℓ ∤ Np, ℓ ≤ safety·Sturm(N).
pub fn congruence_power(f: &RationalNewform, g: &RationalNewform, p: u64, safety: u64) -> Result<Option<u64>> {
    if f.level() == g.level() && f.index() == g.index() {
        return Err(Error::PairDegenerate);
    }
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::InvalidPrime(p));
    }
    let bound = safety.max(1) * sturm_bound(f.level());
    let d = difference_gcd(f, g, p, bound)?;
    if d == 0 {
        return Err(Error::NoCongruence);
    }
    let k = valuation(d, p);
    Ok((k > 0).then(|| p.pow(k)))
}

/// Pairs (f, g) with L(f, 1) ≠ 0, L(g, 1) = 0 and a congruence modulo an odd prime p ≤ p_max.
pub fn find_visible_pairs(forms: &[RationalNewform], p_max: u64, safety: u64) -> Result<Vec<CongruentPair>> {
    let mut out = Vec::new();
    let odd_primes: Vec<u64> = primes_up_to(p_max).into_iter().filter(|&p| p > 2).collect();
    for f in forms.iter().filter(|f| f.analytic_rank_is_zero()) {
        for g in forms.iter().filter(|g| !g.analytic_rank_is_zero()) {
            let bound = safety.max(1) * sturm_bound(f.level());
            for &p in &odd_primes {
                if let Some(r) = congruence_power(f, g, p, safety)? {
                    out.push(CongruentPair { f: f.clone(), g: g.clone(), p, r, index_bound: bound, safety });
                }
            }
        }
    }
    Ok(out)
}

/// Dimension over 𝔽_p of the joint generalized eigenspace on H₁(X₀(N), 𝔽_p) of T_ℓ with
/// eigenvalues a_ℓ, for primes ℓ ∤ Np up to `bound`.
pub fn generalized_eigenspace_dim(space: &ModSymSpace, eig: &dyn Fn(u64) -> Result<i64>, p: u64, bound: u64) -> Result<usize> {
    let n = space.level();
    let dim = space.dimension();
    let mut basis: Vec<Vec<u64>> = (0..dim).map(|i| (0..dim).map(|j| u64::from(i == j)).collect()).collect();
    for l in primes_up_to(bound) {
        if n % l == 0 || l == p || basis.is_empty() {
            continue;
        }
        let t = ModMatrix::from_integer(&space.hecke_matrix(l).matrix, p);
        let a = t
            .restrict(&basis)
            .ok_or_else(|| Error::Internal("subspace is not Hecke-stable mod p".into()))?
            .sub_scalar(reduce_i64(eig(l)?, p));
        // kernel of a^k once the rank stops dropping
        let mut power = a.clone();
        let mut rank = power.rank();
        loop {
            let next = power.mul(&a);
            let r = next.rank();
            if r == rank {
                break;
            }
            power = next;
            rank = r;
        }
        let ker = power.left_kernel();
        basis = ker
            .iter()
            .map(|c| {
                let mut v = vec![0u64; dim];
                for (&x, b) in c.iter().zip(&basis) {
                    if x == 0 {
                        continue;
                    }
                    for (o, &y) in v.iter_mut().zip(b) {
                        *o = ((*o as u128 + x as u128 * y as u128) % p as u128) as u64;
                    }
                }
                v
            })
            .collect();
    }
    Ok(basis.len())
}

/// Proved when the mod-p generalized eigenspace of f at level N is exactly f's own (dimension 2),
/// so no other newform of level dividing N is congruent to f modulo a prime over p.
pub fn excludes_other_congruences(f: &RationalNewform, p: u64) -> Result<Exclusion> {
    let bound = sturm_bound(f.level());
    let d = generalized_eigenspace_dim(f.space(), &|l| f.eigenvalue(l), p, bound)?;
    Ok(if d == 2 { Exclusion::ProvedExcluded } else { Exclusion::PossibleCongruence })
}

/// The pair version: the generalized eigenspace must consist of f and g alone (dimension 4).
pub fn pair_excludes_other_congruences(pair: &CongruentPair) -> Result<Exclusion> {
    let bound = sturm_bound(pair.level());
    let d = generalized_eigenspace_dim(pair.f.space(), &|l| pair.f.eigenvalue(l), pair.p, bound)?;
    Ok(if d == 4 { Exclusion::ProvedExcluded } else { Exclusion::PossibleCongruence })
}

/// Some ℓ ∤ Np with a_ℓ² − 4ℓ a non-residue mod p, which forces E[p] to be irreducible.
pub fn irreducibility_witness(f: &RationalNewform, p: u64, search: u64) -> Result<Option<u64>> {
    let n = f.level();
    for l in primes_up_to(search) {
        if n % l == 0 || l == p {
            continue;
        }
        let a = f.eigenvalue(l)?;
        if crate::arith::legendre(a * a - 4 * l as i64, p) == -1 {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::build_space;
    use crate::newform::rational_newforms;
    use std::sync::Arc;

    fn forms(n: u64) -> Vec<RationalNewform> {
        rational_newforms(&Arc::new(build_space(n).unwrap())).unwrap()
    }

    #[test]
    fn degenerate_pair_rejected() {
        let f = &forms(11)[0];
        assert!(matches!(congruence_power(f, f, 3, 3), Err(Error::PairDegenerate)));
    }

    #[test]
    fn power_matches_wide_oracle() {
        // the oracle takes the gcd over ten times the bound
        for n in [37u64, 53, 57, 58, 61, 65, 77, 79, 82, 83, 88, 89, 91, 92, 99] {
            let fs = forms(n);
            for f in &fs {
                for g in &fs {
                    if f.index() == g.index() {
                        continue;
                    }
                    for p in [3u64, 5, 7] {
                        let r = congruence_power(f, g, p, DEFAULT_SAFETY).unwrap();
                        let wide = difference_gcd(f, g, p, 30 * sturm_bound(n)).unwrap();
                        let k = valuation(wide, p);
                        assert_eq!(r, (k > 0).then(|| p.pow(k)), "N = {n}, p = {p}");
                        assert_eq!(r, congruence_power(g, f, p, DEFAULT_SAFETY).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn level_11_excludes_everything() {
        let f = &forms(11)[0];
        for p in [3u64, 5, 7, 11] {
            assert_eq!(excludes_other_congruences(f, p).unwrap(), Exclusion::ProvedExcluded);
        }
    }

    #[test]
    fn level_37_pairs() {
        let fs = forms(37);
        let pairs = find_visible_pairs(&fs, 7, DEFAULT_SAFETY).unwrap();
        for pair in &pairs {
            assert!(pair.f.analytic_rank_is_zero());
            assert!(!pair.g.analytic_rank_is_zero());
            assert!(pair.p % 2 == 1);
        }
    }

    #[test]
    fn oldform_congruence_is_detected() {
        // the two copies of 11a inside H₁(X₀(33)) must be seen whenever 33a ≡ 11a mod p
        let fs = forms(33);
        assert_eq!(fs.len(), 1);
        let f = &fs[0];
        let eleven = &forms(11)[0];
        for p in [3u64, 5, 7] {
            let congruent = primes_up_to(sturm_bound(33))
                .into_iter()
                .filter(|&l| 33 % l != 0 && l != p)
                .all(|l| (f.eigenvalue(l).unwrap() - eleven.eigenvalue(l).unwrap()) % p as i64 == 0);
            let ex = excludes_other_congruences(f, p).unwrap();
            if congruent {
                assert_eq!(ex, Exclusion::PossibleCongruence, "p = {p}");
            }
        }
    }
}

//! The joint quotient J′ = J/(I_f ∩ I_g)J of a congruent pair and the visibility checks built on it.
//!
//! H₁(J′, ℤ) is realized as ℤ⁴ through π″⁎: x ↦ x·P, where the columns of P form a basis of the
//! saturation of the column span of P_f and P_g. Its kernel is then H₁(B, ℤ), the saturation of
//! (I_f ∩ I_g)·H₁(J, ℤ).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use modvis_linalg::multimodular::solve_left_rational;
use modvis_linalg::{left_kernel_integer, quotient_order, IntegerLattice, IntegerMatrix, LinalgError};

use crate::arith::{big_valuation, primes_up_to, sturm_bound, valuation};
use crate::congruence::{irreducibility_witness, pair_excludes_other_congruences, CongruentPair, Exclusion};
use crate::error::{Error, Result};
use crate::newform::{rational_matrix_to_integer, RationalNewform};
use crate::winding::{lratio_and_image_order, WindingData};

/// H₁(J′, ℤ) = ℤ⁴ with the avatars of E′ and F′ and the image of ℑe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointHomology {
    pub level: u64,
    pub f: String,
    pub g: String,
    /// n × 4 matrix of π″⁎.
    pub projection: IntegerMatrix,
    /// Star involution on ℤ⁴.
    pub star: IntegerMatrix,
    /// 4 × 2 matrix of π′⁎: H₁(J′) → H₁(E), with P_f = P·Q.
    pub to_e: IntegerMatrix,
    pub hjp: IntegerLattice,
    pub hep: IntegerLattice,
    pub hfp: IntegerLattice,
    pub hjp_plus: IntegerLattice,
    pub hep_plus: IntegerLattice,
    pub hfp_plus: IntegerLattice,
    /// π″⁎(ℑe).
    pub winding_image: IntegerLattice,
    /// Whether ker π′⁎ = H₁(F′, ℤ).
    pub kernel_claim: bool,
}

/// Builds J′ for a pair at a common level, given the winding data of that level.
pub fn joint_homology(f: &RationalNewform, g: &RationalNewform, wd: &WindingData) -> Result<JointHomology> {
    if f.level() != g.level() || f.index() == g.index() {
        return Err(Error::PairDegenerate);
    }
    let space = f.space();
    let n = space.dimension();
    let pf = f.quotient_map();
    let pg = g.quotient_map();
    let mut cols: Vec<Vec<BigInt>> = (0..2).map(|j| pf.column(j)).collect();
    cols.extend((0..2).map(|j| pg.column(j)));
    let span = IntegerLattice::from_generators(n, cols)?.saturate();
    if span.rank() != 4 {
        return Err(Error::PairDegenerate);
    }
    let projection = span.basis().transpose();

    let sp = space.star_matrix().mul(&projection)?;
    let star = rational_matrix_to_integer(&solve_left_rational(&projection.transpose(), &sp.transpose())?)?.transpose();
    let to_e = rational_matrix_to_integer(&solve_left_rational(&projection.transpose(), &pf.transpose())?)?.transpose();

    let hjp = IntegerLattice::full(4);
    let hep = f.sub_lattice().image(&projection)?.saturate();
    let hfp = g.sub_lattice().image(&projection)?.saturate();
    let kernel = left_kernel_integer(&to_e)?;
    let kernel_claim = kernel == hfp && hfp.rank() == 2 && hep.rank() == 2;

    let winding_image = wd.ie_lattice.image(&projection)?;
    Ok(JointHomology {
        level: f.level(),
        f: f.label(),
        g: g.label(),
        hjp_plus: hjp.fixed_by(&star)?,
        hep_plus: hep.fixed_by(&star)?,
        hfp_plus: hfp.fixed_by(&star)?,
        projection,
        star,
        to_e,
        hjp,
        hep,
        hfp,
        winding_image,
        kernel_claim,
    })
}

/// π″⁎(ℑe) ⊆ H₁(E′, ℤ).
pub fn winding_image_in_e(jh: &JointHomology) -> bool {
    jh.winding_image.is_sublattice_of(&jh.hep)
}

/// factor1 = |H₁(J′)⁺/(H₁(E′)⁺ + H₁(F′)⁺)| and factor2 = |(H₁(E′)⁺ + H₁(F′)⁺)/(π″⁎(ℑe) + H₁(F′)⁺)|.
///
/// factor2 is None when π″⁎(ℑe) + H₁(F′)⁺ is not a finite-index sublattice.
pub fn mainform_factors(jh: &JointHomology, f: &RationalNewform) -> Result<(BigInt, Option<BigInt>)> {
    if !f.analytic_rank_is_zero() {
        return Err(Error::RankNotZero(f.label()));
    }
    let sum = jh.hep_plus.sum(&jh.hfp_plus)?;
    let factor1 = quotient_order(&jh.hjp_plus, &sum)?;
    let small = jh.winding_image.sum(&jh.hfp_plus)?;
    let factor2 = match quotient_order(&sum, &small) {
        Ok(x) => Some(x),
        Err(LinalgError::NotASublattice | LinalgError::InfiniteQuotient { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok((factor1, factor2))
}

/// |H₁(J′)/(H₁(E′) + H₁(F′))| = |E′ ∩ F′|.
pub fn intersection_order(jh: &JointHomology) -> Result<BigInt> {
    Ok(quotient_order(&jh.hjp, &jh.hep.sum(&jh.hfp)?)?)
}

/// E′[r] = F′[r] inside J′[r], i.e. H₁(E′) + r·H₁(J′) = H₁(F′) + r·H₁(J′).
pub fn torsion_equality_check(jh: &JointHomology, r: u64) -> Result<bool> {
    let rj = jh.hjp.scale(&BigInt::from(r));
    Ok(jh.hep.sum(&rj)? == jh.hfp.sum(&rj)?)
}

/// Odd part of a nonzero integer, made positive.
pub fn odd_part(x: &BigInt) -> BigInt {
    let mut v = x.abs();
    if v.is_zero() {
        return v;
    }
    while (&v % 2u32).is_zero() {
        v /= 2u32;
    }
    v
}

pub fn odd_part_rational(x: &BigRational) -> BigRational {
    BigRational::new(odd_part(x.numer()), odd_part(x.denom()))
}

/// p-adic valuation of a nonzero rational.
pub fn ord_p_rational(x: &BigRational, p: u64) -> i64 {
    big_valuation(x.numer(), p) as i64 - big_valuation(x.denom(), p) as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Proved,
    Failed,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Unknown,
}

/// Hypotheses under which r² is predicted to divide |E(ℚ)|²·L_E(1)/Ω_E.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub p_odd: Flag,
    /// Multiplicity one for the maximal ideal over p: p ∤ N, or p ∥ N with E[p] or F[p] irreducible.
    pub multiplicity_one: Flag,
    pub multiplicity_one_reason: String,
    /// No other newform of level dividing N is congruent to f or g modulo a prime over p.
    pub exclusion: Exclusion,
    /// p² ∤ N; otherwise the Manin constant is assumed to be 1.
    pub p_squared_free: Flag,
}

impl Hypotheses {
    pub fn all_proved(&self) -> bool {
        self.p_odd == Flag::Proved
            && self.multiplicity_one == Flag::Proved
            && self.exclusion == Exclusion::ProvedExcluded
            && self.p_squared_free == Flag::Proved
    }
}

/// Arithmetic of the optimal curve attached to f, when it is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFacts {
    pub label: String,
    pub torsion: u64,
    pub tamagawa_product: u64,
}

/// One p-adic divisibility check: ord_p(quantity) ≥ required.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdpCheck {
    pub name: String,
    /// Lower and upper bounds for ord_p of the quantity (equal when known exactly).
    pub ord_low: Option<i64>,
    pub ord_high: Option<i64>,
    pub required: i64,
    pub outcome: Outcome,
}

impl OrdpCheck {
    fn new(name: &str, low: Option<i64>, high: Option<i64>, required: i64) -> Self {
        let outcome = match (low, high) {
            (Some(l), _) if l >= required => Outcome::Pass,
            (_, Some(h)) if h < required => Outcome::Fail,
            _ => Outcome::Unknown,
        };
        Self { name: name.into(), ord_low: low, ord_high: high, required, outcome }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibilityVerdict {
    pub level: u64,
    pub f: String,
    pub g: String,
    pub p: u64,
    pub r: u64,
    pub exponent: u32,
    #[serde(with = "crate::exact::big")]
    pub factor1: BigInt,
    #[serde(with = "crate::exact::big_opt")]
    pub factor2: Option<BigInt>,
    /// cuspidal_image_order(f).
    #[serde(with = "crate::exact::big")]
    pub denom: BigInt,
    #[serde(with = "crate::exact::rational")]
    pub lratio: BigRational,
    #[serde(with = "crate::exact::big")]
    pub intersection_order: BigInt,
    pub torsion_equal_at_r: bool,
    pub winding_in_e: bool,
    pub odd_part_identity: bool,
    pub kernel_claim: bool,
    pub factor1_matches_intersection: bool,
    pub hypotheses: Hypotheses,
    pub ordp_checks: Vec<OrdpCheck>,
    pub curve: Option<CurveFacts>,
    #[serde(with = "crate::exact::rational_opt")]
    pub sha_analytic: Option<BigRational>,
    /// Set when some hypothesis is not proved; only the unconditional checks then count.
    pub unverifiable: Option<String>,
}

impl VisibilityVerdict {
    /// Checks that need no hypothesis beyond the ranks of f and g.
    pub fn unconditional_ok(&self) -> bool {
        self.winding_in_e && self.odd_part_identity && self.kernel_claim && self.factor1_matches_intersection
    }

    pub fn conditional_checks_apply(&self) -> bool {
        self.hypotheses.all_proved()
    }

    /// True when the hypotheses are proved and a conditional check fails.
    pub fn conditional_failure(&self) -> bool {
        self.conditional_checks_apply()
            && (!self.torsion_equal_at_r || self.ordp_checks.iter().any(|c| c.outcome == Outcome::Fail))
    }
}

/// Search range for irreducibility witnesses and torsion bounds.
const AUXILIARY_SEARCH: u64 = 200;

pub fn hypotheses(pair: &CongruentPair) -> Result<Hypotheses> {
    let n = pair.level();
    let p = pair.p;
    let p_odd = if p % 2 == 1 { Flag::Proved } else { Flag::Failed };
    let v = valuation(n, p);
    let (multiplicity_one, reason) = match v {
        0 => (Flag::Proved, "p does not divide N".to_string()),
        1 => {
            let search = AUXILIARY_SEARCH.max(3 * sturm_bound(n));
            if let Some(l) = irreducibility_witness(&pair.f, p, search)? {
                (Flag::Proved, format!("p exactly divides N; E[p] irreducible by Frobenius at {l}"))
            } else if let Some(l) = irreducibility_witness(&pair.g, p, search)? {
                (Flag::Proved, format!("p exactly divides N; F[p] irreducible by Frobenius at {l}"))
            } else {
                (Flag::Unknown, "p exactly divides N; no irreducibility witness found".to_string())
            }
        }
        _ => (Flag::Unknown, "p² divides N".to_string()),
    };
    let exclusion = pair_excludes_other_congruences(pair)?;
    let p_squared_free = if v >= 2 { Flag::Unknown } else { Flag::Proved };
    Ok(Hypotheses { p_odd, multiplicity_one, multiplicity_one_reason: reason, exclusion, p_squared_free })
}

/// Bounds on ord_p |E(ℚ)_tor|: below by the cuspidal image order, above by #Ẽ(𝔽_ℓ) at good ℓ ≠ p.
pub fn torsion_ord_bounds(f: &RationalNewform, p: u64, denom: &BigInt) -> Result<(i64, i64)> {
    let low = big_valuation(denom, p) as i64;
    let mut high = i64::MAX;
    for l in primes_up_to(AUXILIARY_SEARCH) {
        if f.level() % l == 0 || l == p {
            continue;
        }
        let count = l as i64 + 1 - f.eigenvalue(l)?;
        high = high.min(valuation(count as u64, p) as i64);
        if high == 0 {
            break;
        }
    }
    Ok((low, high.max(low)))
}

/// All visibility checks for a congruent pair.
pub fn verify_main_theorem(pair: &CongruentPair, wd: &WindingData, curve: Option<&CurveFacts>) -> Result<VisibilityVerdict> {
    let f = &pair.f;
    let g = &pair.g;
    let p = pair.p;
    let k = pair.exponent() as i64;
    let jh = joint_homology(f, g, wd)?;
    let (lratio, denom) = match lratio_and_image_order(f, wd)? {
        (Some(l), Some(d)) => (l, d),
        _ => return Err(Error::RankNotZero(f.label())),
    };
    let (factor1, factor2) = mainform_factors(&jh, f)?;
    let inter = intersection_order(&jh)?;
    let winding_in_e = winding_image_in_e(&jh);
    let odd_part_identity = match &factor2 {
        Some(f2) => {
            odd_part_rational(&(&lratio * BigRational::from_integer(denom.clone())))
                == BigRational::from_integer(odd_part(&(&factor1 * f2)))
        }
        None => false,
    };
    let torsion_equal_at_r = torsion_equality_check(&jh, pair.r)?;
    let hyp = hypotheses(pair)?;

    let mut checks = Vec::new();
    let f1 = big_valuation(&factor1, p) as i64;
    checks.push(OrdpCheck::new("factor1", Some(f1), Some(f1), 2 * k));
    let ord_l = ord_p_rational(&lratio, p);
    let (t_low, t_high) = match curve {
        Some(c) => {
            let t = valuation(c.torsion, p) as i64;
            (t, t)
        }
        None => torsion_ord_bounds(f, p, &denom)?,
    };
    checks.push(OrdpCheck::new("torsion_squared_lratio", Some(2 * t_low + ord_l), Some(2 * t_high + ord_l), 2 * k));
    let sha_analytic = curve.map(|c| {
        let t = BigInt::from(c.torsion);
        &lratio * BigRational::from_integer(&t * &t) / BigRational::from_integer(BigInt::from(c.tamagawa_product))
    });
    match &sha_analytic {
        Some(s) if !s.is_zero() => {
            let o = ord_p_rational(s, p);
            checks.push(OrdpCheck::new("sha_analytic", Some(o), Some(o), 2 * k));
        }
        _ => checks.push(OrdpCheck::new("sha_analytic", None, None, 2 * k)),
    }
    let unverifiable = (!hyp.all_proved()).then(|| Error::HypothesisUnverifiable(describe_unproved(&hyp)).to_string());
    Ok(VisibilityVerdict {
        level: pair.level(),
        f: f.label(),
        g: g.label(),
        p,
        r: pair.r,
        exponent: pair.exponent(),
        factor1_matches_intersection: odd_part(&factor1) == odd_part(&inter),
        factor1,
        factor2,
        denom,
        lratio,
        intersection_order: inter,
        torsion_equal_at_r,
        winding_in_e,
        odd_part_identity,
        kernel_claim: jh.kernel_claim,
        hypotheses: hyp,
        ordp_checks: checks,
        curve: curve.cloned(),
        sha_analytic,
        unverifiable,
    })
}

fn describe_unproved(h: &Hypotheses) -> String {
    let mut parts = Vec::new();
    if h.p_odd != Flag::Proved {
        parts.push("p is even".to_string());
    }
    if h.multiplicity_one != Flag::Proved {
        parts.push(h.multiplicity_one_reason.clone());
    }
    if h.exclusion != Exclusion::ProvedExcluded {
        parts.push("another congruent eigenform may exist".to_string());
    }
    if h.p_squared_free != Flag::Proved {
        parts.push("Manin constant assumed to be 1".to_string());
    }
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{find_visible_pairs, DEFAULT_SAFETY};
    use crate::modsym::build_space;
    use crate::newform::rational_newforms;
    use crate::winding::winding_data;
    use std::sync::Arc;

    fn pairs_at(n: u64, p_max: u64) -> (Vec<CongruentPair>, WindingData) {
        let space = Arc::new(build_space(n).unwrap());
        let forms = rational_newforms(&space).unwrap();
        let wd = winding_data(&space).unwrap();
        (find_visible_pairs(&forms, p_max, DEFAULT_SAFETY).unwrap(), wd)
    }

    #[test]
    fn odd_parts() {
        assert_eq!(odd_part(&BigInt::from(-24)), BigInt::from(3));
        assert_eq!(odd_part_rational(&BigRational::new(12.into(), 10.into())), BigRational::new(3.into(), 5.into()));
        assert_eq!(ord_p_rational(&BigRational::new(9.into(), 15.into()), 3), 1);
        assert_eq!(ord_p_rational(&BigRational::new(1.into(), 5.into()), 5), -1);
    }

    #[test]
    fn ordp_check_bounds() {
        assert_eq!(OrdpCheck::new("x", Some(2), Some(3), 2).outcome, Outcome::Pass);
        assert_eq!(OrdpCheck::new("x", Some(0), Some(1), 2).outcome, Outcome::Fail);
        assert_eq!(OrdpCheck::new("x", Some(0), Some(4), 2).outcome, Outcome::Unknown);
        assert_eq!(OrdpCheck::new("x", None, None, 0).outcome, Outcome::Unknown);
    }

    #[test]
    fn degenerate_pair_rejected() {
        let space = Arc::new(build_space(37).unwrap());
        let forms = rational_newforms(&space).unwrap();
        let wd = winding_data(&space).unwrap();
        assert!(matches!(joint_homology(&forms[0], &forms[0], &wd), Err(Error::PairDegenerate)));
    }

    #[test]
    fn small_level_pairs() {
        let mut seen = 0;
        for n in [99u64, 142, 154] {
            let (pairs, wd) = pairs_at(n, 11);
            for pair in pairs {
                seen += 1;
                let jh = joint_homology(&pair.f, &pair.g, &wd).unwrap();
                assert_eq!(jh.hep.rank(), 2);
                assert_eq!(jh.hfp.rank(), 2);
                assert!(jh.hep.intersection(&jh.hfp).unwrap().rank() == 0);
                assert!(jh.kernel_claim);
                // π″⁎ is onto ℤ⁴
                let img = IntegerLattice::full(pair.f.space().dimension()).image(&jh.projection).unwrap();
                assert_eq!(img, jh.hjp);
                assert!(torsion_equality_check(&jh, 1).unwrap());
                let v = verify_main_theorem(&pair, &wd, None).unwrap();
                assert!(v.unconditional_ok(), "{v:?}");
                assert!(v.intersection_order.is_positive());
                if v.conditional_checks_apply() {
                    assert!(!v.conditional_failure(), "{v:?}");
                    assert!(v.torsion_equal_at_r);
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn non_congruent_prime_breaks_torsion_equality() {
        // at a prime where the pair is not congruent, E′[p] and F′[p] differ
        let (pairs, wd) = pairs_at(99, 7);
        let pair = pairs.first().expect("99 has a congruent pair");
        let jh = joint_homology(&pair.f, &pair.g, &wd).unwrap();
        for q in [3u64, 5, 7, 11, 13] {
            let congruent = congruent_mod(&pair.f, &pair.g, q);
            if !congruent {
                assert!(!torsion_equality_check(&jh, q).unwrap(), "q = {q}");
            }
        }
    }

    fn congruent_mod(f: &RationalNewform, g: &RationalNewform, q: u64) -> bool {
        primes_up_to(3 * sturm_bound(f.level()))
            .into_iter()
            .filter(|&l| f.level() % l != 0 && l != q)
            .all(|l| (f.eigenvalue(l).unwrap() - g.eigenvalue(l).unwrap()) % q as i64 == 0)
    }
}

//! Elliptic curves over ℚ given by Weierstrass models: local data, torsion, traces of Frobenius,
//! matching to rational newforms and the analytic order of Sha.

pub mod tate;
pub mod torsion;
pub mod weierstrass;

use std::io::BufRead;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, sturm_bound, valuation};
use crate::error::{Error, Result};
use crate::newform::RationalNewform;
use crate::visibility::{CurveFacts, Flag};
use crate::winding::WindingData;
use modvis_linalg::factor::factor_big;
use num_traits::{ToPrimitive, Zero};

pub use tate::{tate_local_data, Kodaira, LocalData, Reduction};
pub use torsion::{count_points, torsion_bound, torsion_order};
pub use weierstrass::Weierstrass;

/// One line of a curve file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    #[serde(rename = "N")]
    pub conductor: u64,
    pub ainvs: [i64; 5],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<u64>,
}

impl CurveRecord {
    pub fn model(&self) -> Weierstrass {
        Weierstrass::new(self.ainvs)
    }
}

/// Records that parsed, and per-line errors for those that did not.
#[derive(Debug, Default)]
pub struct CurveFile {
    pub records: Vec<CurveRecord>,
    pub errors: Vec<Error>,
}

pub fn parse_curve_lines<R: BufRead>(reader: R) -> Result<CurveFile> {
    let mut out = CurveFile::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CurveRecord>(&line) {
            Ok(rec) if rec.model().is_singular() => {
                out.errors.push(Error::Schema { line: i + 1, message: format!("{}: singular model", rec.label) })
            }
            Ok(rec) if rec.conductor == 0 => {
                out.errors.push(Error::Schema { line: i + 1, message: format!("{}: conductor must be positive", rec.label) })
            }
            Ok(rec) => out.records.push(rec),
            Err(e) => out.errors.push(Error::Schema { line: i + 1, message: e.to_string() }),
        }
    }
    Ok(out)
}

pub fn parse_curve_file(path: &Path) -> Result<CurveFile> {
    let f = std::fs::File::open(path)?;
    parse_curve_lines(std::io::BufReader::new(f))
}

/// A curve with its arithmetic invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveData {
    pub record: CurveRecord,
    pub local: Vec<LocalData>,
    pub conductor: u64,
    pub torsion: u64,
    pub real_components: u8,
}

impl CurveData {
    pub fn tamagawa_product(&self) -> u64 {
        self.local.iter().map(|l| l.tamagawa).product()
    }

    pub fn local_at(&self, q: u64) -> Option<&LocalData> {
        self.local.iter().find(|l| l.prime == q)
    }

    pub fn facts(&self) -> CurveFacts {
        CurveFacts { label: self.record.label.clone(), torsion: self.torsion, tamagawa_product: self.tamagawa_product() }
    }

    /// a_ℓ from a point count on a model minimal at ℓ.
    pub fn ap(&self, l: u64) -> Result<i64> {
        ap_point_count(self, l)
    }
}

fn bad_primes(model: &Weierstrass) -> Result<Vec<u64>> {
    let (primes, rest) = factor_big(&model.discriminant());
    if rest > BigInt::from(1) {
        return Err(Error::Internal("discriminant could not be factored".into()));
    }
    Ok(primes.iter().map(|p| p.to_u64().expect("small prime")).collect())
}

/// Local data at every prime dividing the discriminant, torsion, and the conductor check.
pub fn analyze_curve(record: &CurveRecord) -> Result<CurveData> {
    let model = record.model();
    if model.is_singular() {
        return Err(Error::SingularCurve);
    }
    let local: Vec<LocalData> = bad_primes(&model)?.into_iter().map(|q| tate_local_data(&model, q)).collect();
    let conductor: u64 = local.iter().map(|l| l.prime.pow(l.conductor_exponent)).product();
    if conductor != record.conductor {
        return Err(Error::ConductorMismatch { label: record.label.clone(), computed: conductor, recorded: record.conductor });
    }
    let local: Vec<LocalData> = local.into_iter().filter(|l| l.conductor_exponent > 0).collect();
    let torsion = torsion_order(&model)?;
    if let Some(t) = record.torsion {
        if t != torsion {
            return Err(Error::DeclaredMismatch { label: record.label.clone(), field: "torsion", declared: t, computed: torsion });
        }
    }
    Ok(CurveData { record: record.clone(), local, conductor, torsion, real_components: model.real_components() })
}

/// a_ℓ = ℓ + 1 − #Ẽ(𝔽_ℓ) for ℓ of good reduction.
pub fn ap_point_count(curve: &CurveData, l: u64) -> Result<i64> {
    if curve.conductor % l == 0 {
        return Err(Error::BadReduction(l));
    }
    let model = curve.record.model();
    let model = if modvis_linalg::modp::reduce_big(&model.discriminant(), l) == 0 {
        tate_local_data(&model, l).minimal_model
    } else {
        model
    };
    torsion::trace_of_frobenius(&model, l)
}

/// Index of the unique form whose a_ℓ equal the point counts for good ℓ ≤ Sturm bound.
pub fn match_curve_to_newform(curve: &CurveData, forms: &[RationalNewform]) -> Result<Option<usize>> {
    let n = curve.conductor;
    if let Some(f) = forms.iter().find(|f| f.level() != n) {
        return Err(Error::LevelMismatch { label: curve.record.label.clone(), conductor: n, level: f.level() });
    }
    let primes: Vec<u64> = primes_up_to(sturm_bound(n).max(2)).into_iter().filter(|l| n % l != 0).collect();
    let aps = primes.iter().map(|&l| ap_point_count(curve, l)).collect::<Result<Vec<_>>>()?;
    let mut hits = Vec::new();
    for (i, f) in forms.iter().enumerate() {
        let mut ok = true;
        for (&l, &a) in primes.iter().zip(&aps) {
            if f.eigenvalue(l)? != a {
                ok = false;
                break;
            }
        }
        if ok {
            hits.push(i);
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(Some(hits[0])),
        _ => Err(Error::AmbiguousMatch(curve.record.label.clone())),
    }
}

/// The analytic side of the Birch and Swinnerton-Dyer formula for a matched curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsdReport {
    pub curve: String,
    pub form: String,
    #[serde(with = "crate::exact::rational_opt")]
    pub lratio: Option<BigRational>,
    pub torsion: u64,
    pub tamagawa_product: u64,
    /// Number of components of E(ℝ); L/Ω = lratio / (c_E · c_∞).
    pub c_infinity: u8,
    /// |E(ℚ)_tors|² · lratio / (c_∞ · ∏ c_q), taking c_E = 1.
    #[serde(with = "crate::exact::rational_opt")]
    pub sha_analytic: Option<BigRational>,
    pub manin_assumption: bool,
    pub c_infinity_note: String,
    pub optimal_assumption: bool,
}

pub fn bsd_report(curve: &CurveData, f: &RationalNewform, wd: &WindingData) -> Result<BsdReport> {
    let lratio = crate::winding::lratio(f, wd)?;
    let t = BigInt::from(curve.torsion);
    let denom = BigInt::from(curve.real_components as u64 * curve.tamagawa_product());
    let sha = lratio.as_ref().map(|l| l * BigRational::from_integer(&t * &t) / BigRational::from_integer(denom));
    Ok(BsdReport {
        curve: curve.record.label.clone(),
        form: f.label(),
        lratio,
        torsion: curve.torsion,
        tamagawa_product: curve.tamagawa_product(),
        c_infinity: curve.real_components,
        sha_analytic: sha,
        manin_assumption: true,
        c_infinity_note: "c_inf is the number of real components; only powers of 2 depend on it".into(),
        optimal_assumption: true,
    })
}

/// Curve-side hypothesis flags for a pair (E, F) and an odd prime p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveHypotheses {
    pub p_odd: Flag,
    pub p_coprime_to_n: Flag,
    pub p_squared_free: Flag,
    /// Some good ℓ ∤ pN with x² − a_ℓx + ℓ irreducible mod p.
    pub e_irreducible: Flag,
    pub f_irreducible: Flag,
    pub p_coprime_tamagawa_e: Flag,
    pub p_coprime_tamagawa_f: Flag,
    pub p_coprime_torsion_f: Flag,
    /// |(J₀(N)/F^∨)(ℚ)_tors| is out of reach here.
    pub quotient_torsion: String,
}

fn irreducible_flag(curve: &CurveData, p: u64) -> Result<Flag> {
    for l in primes_up_to(500) {
        if curve.conductor % l == 0 || l == p {
            continue;
        }
        let a = curve.ap(l)?;
        if crate::arith::legendre(a * a - 4 * l as i64, p) == -1 {
            return Ok(Flag::Proved);
        }
    }
    Ok(Flag::Unknown)
}

fn coprime_flag(x: u64, p: u64) -> Flag {
    if x % p == 0 {
        Flag::Failed
    } else {
        Flag::Proved
    }
}

pub fn hypothesis_report(p: u64, e: Option<&CurveData>, f: Option<&CurveData>, level: u64) -> Result<CurveHypotheses> {
    let v = valuation(level, p);
    let tamagawa = |c: Option<&CurveData>| match c {
        Some(c) if c.local.iter().any(|l| l.tamagawa % p == 0) => Flag::Failed,
        Some(_) => Flag::Proved,
        None => Flag::Unknown,
    };
    Ok(CurveHypotheses {
        p_odd: coprime_flag(p, 2),
        p_coprime_to_n: if v == 0 { Flag::Proved } else { Flag::Failed },
        p_squared_free: if v >= 2 { Flag::Failed } else { Flag::Proved },
        e_irreducible: e.map(|c| irreducible_flag(c, p)).transpose()?.unwrap_or(Flag::Unknown),
        f_irreducible: f.map(|c| irreducible_flag(c, p)).transpose()?.unwrap_or(Flag::Unknown),
        p_coprime_tamagawa_e: tamagawa(e),
        p_coprime_tamagawa_f: tamagawa(f),
        p_coprime_torsion_f: f.map(|c| coprime_flag(c.torsion, p)).unwrap_or(Flag::Unknown),
        quotient_torsion: "not checked".into(),
    })
}

/// Whether a rational number is the square of an integer.
pub fn is_integer_square(x: &BigRational) -> bool {
    if !x.is_integer() || x.numer() < &BigInt::zero() {
        return false;
    }
    let n = x.to_integer();
    let r = n.sqrt();
    &r * &r == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::build_space;
    use crate::newform::rational_newforms;
    use crate::winding::winding_data;
    use std::sync::Arc;

    fn record(label: &str, n: u64, a: [i64; 5]) -> CurveRecord {
        CurveRecord { label: label.into(), conductor: n, ainvs: a, rank: None, torsion: None }
    }

    #[test]
    fn parsing() {
        let text = concat!(
            "{\"label\":\"11a1\",\"N\":11,\"ainvs\":[0,-1,1,-10,-20],\"extra\":true}\n",
            "\n",
            "{\"label\":\"bad\",\"N\":11,\"ainvs\":[0,-1,1,-10]}\n",
            "{\"label\":\"sing\",\"N\":11,\"ainvs\":[0,0,0,0,0]}\n",
            "not json\n",
        );
        let cf = parse_curve_lines(text.as_bytes()).unwrap();
        assert_eq!(cf.records.len(), 1);
        assert_eq!(cf.records[0].label, "11a1");
        assert_eq!(cf.errors.len(), 3);
        assert!(matches!(cf.errors[0], Error::Schema { line: 3, .. }));
        assert!(parse_curve_lines("".as_bytes()).unwrap().records.is_empty());
        assert_eq!(Weierstrass::new([0, -1, 1, -10, -20]).discriminant(), BigInt::from(-161051));
    }

    #[test]
    fn conductor_is_checked() {
        assert!(matches!(analyze_curve(&record("x", 13, [0, -1, 1, -10, -20])), Err(Error::ConductorMismatch { computed: 11, .. })));
        let mut r = record("11a1", 11, [0, -1, 1, -10, -20]);
        r.torsion = Some(3);
        assert!(matches!(analyze_curve(&r), Err(Error::DeclaredMismatch { .. })));
    }

    #[test]
    fn multiplicative_split_agrees_with_point_count() {
        // on a nodal cubic the number of 𝔽_q points (node included) is q when split and q + 2 otherwise
        for (a, q) in [([1, 0, 1, -5, -8], 2u64), ([0, -1, 1, -10, -20], 11), ([1, 0, 1, 4, -6], 7), ([1, 1, 1, -10, -10], 5), ([1, 0, 0, -3, 1], 17)] {
            let ld = tate_local_data(&Weierstrass::new(a), q);
            let m = ld.minimal_model.reduce(q);
            let mut count = 1;
            for x in 0..q {
                for y in 0..q {
                    let lhs = y * y + m[0] * x * y + m[2] * y;
                    let rhs = x * x * x + m[1] * x * x + m[3] * x + m[4];
                    if lhs % q == rhs % q {
                        count += 1;
                    }
                }
            }
            let split = count == q;
            assert!(count == q || count == q + 2);
            let expected = match (split, ld.disc_valuation % 2) {
                (true, _) => ld.disc_valuation as u64,
                (false, 1) => 1,
                (false, _) => 2,
            };
            assert_eq!(ld.tamagawa, expected, "{a:?} at {q}");
            assert_eq!(ld.reduction == Reduction::SplitMultiplicative, split);
        }
    }

    #[test]
    fn level_11_bsd() {
        let cd = analyze_curve(&record("11a1", 11, [0, -1, 1, -10, -20])).unwrap();
        assert_eq!(cd.torsion, 5);
        assert_eq!(cd.local_at(11).unwrap().tamagawa, 5);
        assert_eq!(cd.ap(2).unwrap(), -2);
        assert!(matches!(cd.ap(11), Err(Error::BadReduction(11))));
        let space = Arc::new(build_space(11).unwrap());
        let forms = rational_newforms(&space).unwrap();
        let i = match_curve_to_newform(&cd, &forms).unwrap().unwrap();
        let wd = winding_data(&space).unwrap();
        let b = bsd_report(&cd, &forms[i], &wd).unwrap();
        let sha = b.sha_analytic.clone().unwrap();
        assert_eq!(sha, BigRational::from_integer(1.into()));
        // sha · ∏c_q · c_∞ = t² · lratio
        let lhs = &sha * BigRational::from_integer(BigInt::from(b.tamagawa_product * b.c_infinity as u64));
        assert_eq!(lhs, b.lratio.unwrap() * BigRational::from_integer(BigInt::from(25)));
    }

    #[test]
    fn rank_one_at_37() {
        let cd = analyze_curve(&record("37a1", 37, [0, 0, 1, -1, 0])).unwrap();
        assert_eq!(cd.ap(2).unwrap(), -2);
        let space = Arc::new(build_space(37).unwrap());
        let forms = rational_newforms(&space).unwrap();
        let i = match_curve_to_newform(&cd, &forms).unwrap().unwrap();
        assert!(!forms[i].analytic_rank_is_zero());
        let eleven = Arc::new(build_space(11).unwrap());
        assert!(matches!(match_curve_to_newform(&cd, &rational_newforms(&eleven).unwrap()), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn hypothesis_flags() {
        let e = analyze_curve(&record("11a1", 11, [0, -1, 1, -10, -20])).unwrap();
        let h = hypothesis_report(2, Some(&e), None, 11).unwrap();
        assert_eq!(h.p_odd, Flag::Failed);
        let h = hypothesis_report(5, Some(&e), Some(&e), 11).unwrap();
        assert_eq!(h.p_odd, Flag::Proved);
        assert_eq!(h.p_coprime_tamagawa_e, Flag::Failed);
        assert_eq!(h.p_coprime_torsion_f, Flag::Failed);
        // E[5] is reducible for 11a1, so no certificate exists
        assert_eq!(h.e_irreducible, Flag::Unknown);
        let h = hypothesis_report(3, Some(&e), None, 11).unwrap();
        assert_eq!(h.e_irreducible, Flag::Proved);
        assert_eq!(h.p_coprime_tamagawa_f, Flag::Unknown);
        assert_eq!(h.quotient_torsion, "not checked");
    }

    #[test]
    fn square_detection() {
        assert!(is_integer_square(&BigRational::from_integer(9.into())));
        assert!(!is_integer_square(&BigRational::new(9.into(), 4.into())));
        assert!(!is_integer_square(&BigRational::from_integer(8.into())));
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use modvis::curves::{analyze_curve, match_curve_to_newform, parse_curve_file, tate_local_data};
use modvis::harness::{cache_roundtrip, run_scan, ScanConfig, ScanReport};
use modvis::visibility::{joint_homology, mainform_factors, odd_part, odd_part_rational, winding_image_in_e, Outcome};
use modvis::winding::{cuspidal_image_order, lratio_and_image_order};
use modvis::{build_space, rational_newforms, winding_data};

fn curve_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/curves.jsonl")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Classical genus formula, counted directly.
fn genus_oracle(n: u64) -> u64 {
    let mut mu_num = n;
    let mut mu_den = 1;
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            mu_num *= p + 1;
            mu_den *= p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    let mu = mu_num / mu_den;
    let nu2 = (0..n).filter(|x| (x * x + 1) % n == 0).count() as i64;
    let nu3 = (0..n).filter(|x| (x * x + x + 1) % n == 0).count() as i64;
    let phi = |k: u64| (1..=k).filter(|&j| gcd(j, k) == 1).count() as i64;
    let cusps: i64 = (1..=n).filter(|d| n % d == 0).map(|d| phi(gcd(d, n / d))).sum();
    let twelve_g = 12 + mu as i64 - 3 * nu2 - 4 * nu3 - 6 * cusps;
    (twelve_g / 12) as u64
}

fn structural() -> Result<String, String> {
    let mut hecke_pairs = 0;
    for n in 1..=120u64 {
        let s = build_space(n).map_err(|e| format!("N={n}: {e}"))?;
        if s.dimension() as u64 != 2 * genus_oracle(n) {
            return Err(format!("N={n}: dimension {} vs genus {}", s.dimension(), genus_oracle(n)));
        }
        if s.dimension() == 0 {
            continue;
        }
        let star = s.star_matrix();
        if star.mul(star).unwrap() != modvis_linalg::IntegerMatrix::identity(s.dimension()) {
            return Err(format!("N={n}: star is not an involution"));
        }
        if !s.h1_basis_in_m().mul(&s.boundary_matrix()).unwrap().is_zero() {
            return Err(format!("N={n}: H1 basis has nonzero boundary"));
        }
        let sturm = modvis::arith::sturm_bound(n);
        let mats: Vec<_> = (1..=sturm).map(|k| s.hecke_matrix(k)).collect();
        for a in &mats {
            if a.matrix.mul(star).unwrap() != star.mul(&a.matrix).unwrap() {
                return Err(format!("N={n}: T_{} does not commute with star", a.index));
            }
            for b in mats.iter().filter(|b| b.index > a.index) {
                hecke_pairs += 1;
                if a.matrix.mul(&b.matrix).unwrap() != b.matrix.mul(&a.matrix).unwrap() {
                    return Err(format!("N={n}: T_{} and T_{} do not commute", a.index, b.index));
                }
            }
        }
        let back = cache_roundtrip(&s).map_err(|e| e.to_string())?;
        if back.h1_basis_in_m() != s.h1_basis_in_m()
            || back.star_matrix() != s.star_matrix()
            || mats.iter().any(|m| back.hecke_matrix(m.index) != *m)
        {
            return Err(format!("N={n}: cache roundtrip differs"));
        }
    }
    Ok(format!("120 levels, {hecke_pairs} commuting Hecke pairs"))
}

fn eichler_shimura() -> Result<String, String> {
    let cf = parse_curve_file(&curve_file()).map_err(|e| e.to_string())?;
    if !cf.errors.is_empty() || cf.records.len() != 20 {
        return Err(format!("{} records, {} parse errors", cf.records.len(), cf.errors.len()));
    }
    let mut compared = 0;
    for rec in &cf.records {
        let cd = analyze_curve(rec).map_err(|e| e.to_string())?;
        let space = Arc::new(build_space(rec.conductor).map_err(|e| e.to_string())?);
        let forms = rational_newforms(&space).map_err(|e| e.to_string())?;
        let i = match_curve_to_newform(&cd, &forms)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{} matches no newform", rec.label))?;
        let n = rec.conductor;
        for l in modvis::arith::primes_up_to(modvis::arith::sturm_bound(n)) {
            if n % l == 0 {
                continue;
            }
            let a = forms[i].eigenvalue(l).map_err(|e| e.to_string())?;
            if a != cd.ap(l).map_err(|e| e.to_string())? {
                return Err(format!("{}: a_{l} differs", rec.label));
            }
            compared += 1;
        }
    }
    Ok(format!("20 curves, {compared} exact a_l comparisons"))
}

fn golden_eleven() -> Result<String, String> {
    let space = Arc::new(build_space(11).unwrap());
    let forms = rational_newforms(&space).unwrap();
    let f = &forms[0];
    let wd = winding_data(&space).unwrap();
    let rec = modvis::curves::CurveRecord { label: "11a1".into(), conductor: 11, ainvs: [0, -1, 1, -10, -20], rank: None, torsion: None };
    let cd = analyze_curve(&rec).unwrap();
    let b = modvis::curves::bsd_report(&cd, f, &wd).unwrap();
    let eig: Vec<i64> = [2, 3, 5, 7].iter().map(|&l| f.eigenvalue(l).unwrap()).collect();
    let checks = [
        ("dimension 2", space.dimension() == 2),
        ("a2,a3,a5,a7 = -2,-1,1,-2", eig == [-2, -1, 1, -2]),
        ("winding denominator 5", wd.cuspidal_order == BigInt::from(5)),
        ("lratio 1/5", b.lratio == Some(BigRational::new(1.into(), 5.into()))),
        ("cuspidal image order 5", cuspidal_image_order(f, &wd).unwrap() == BigInt::from(5)),
        ("Tamagawa c11 = 5", tate_local_data(&rec.model(), 11).tamagawa == 5),
        ("torsion 5", cd.torsion == 5),
        ("sha_analytic 1", b.sha_analytic == Some(BigRational::from_integer(1.into()))),
    ];
    match checks.iter().find(|(_, ok)| !ok) {
        Some((name, _)) => Err(format!("{name} fails")),
        None => Ok(format!("{} golden values", checks.len())),
    }
}

/// Every pair (f, g) of rational newforms with L(f,1) ≠ 0 and L(g,1) = 0 at levels up to 500.
fn all_rank_pairs() -> Result<(String, String), String> {
    let (mut pairs, mut contain_fail, mut identity_fail) = (0, Vec::new(), Vec::new());
    for n in 11..=500u64 {
        if modvis::arith::genus_x0(n) == 0 {
            continue;
        }
        let space = Arc::new(build_space(n).map_err(|e| e.to_string())?);
        let forms = rational_newforms(&space).map_err(|e| e.to_string())?;
        let (r0, r1): (Vec<_>, Vec<_>) = forms.iter().partition(|f| f.analytic_rank_is_zero());
        if r0.is_empty() || r1.is_empty() {
            continue;
        }
        let wd = winding_data(&space).map_err(|e| e.to_string())?;
        for f in &r0 {
            let (lr, cio) = lratio_and_image_order(f, &wd).map_err(|e| e.to_string())?;
            let lhs = odd_part_rational(&(lr.unwrap() * BigRational::from_integer(cio.unwrap())));
            for g in &r1 {
                pairs += 1;
                let jh = joint_homology(f, g, &wd).map_err(|e| e.to_string())?;
                if !winding_image_in_e(&jh) {
                    contain_fail.push(format!("{}/{}", f.label(), g.label()));
                }
                let (f1, f2) = mainform_factors(&jh, f).map_err(|e| e.to_string())?;
                let ok = f2.is_some_and(|f2| lhs == BigRational::from_integer(odd_part(&(f1 * f2))));
                if !ok {
                    identity_fail.push(format!("{}/{}", f.label(), g.label()));
                }
            }
        }
    }
    let fmt = |fails: Vec<String>| {
        if fails.is_empty() {
            Ok(format!("{pairs} pairs, 0 failures"))
        } else {
            Err(format!("{} of {pairs} pairs fail: {}", fails.len(), fails.join(", ")))
        }
    };
    Ok((fmt(contain_fail)?, fmt(identity_fail)?))
}

fn scan(from: u64, to: u64, threads: usize, curves: bool) -> ScanReport {
    let mut cfg = ScanConfig::new(from, to, "unused.jsonl");
    cfg.threads = threads;
    cfg.curve_file = curves.then(curve_file);
    run_scan(&cfg).expect("scan")
}

fn conditional_checks(r: &ScanReport) -> Result<String, String> {
    let proved: Vec<_> = r.pairs().filter(|p| p.conditional_checks_apply).collect();
    let bad: Vec<String> = proved
        .iter()
        .filter(|p| p.verdict.ordp_checks.iter().any(|c| c.name != "sha_analytic" && c.outcome == Outcome::Fail))
        .map(|p| format!("{}/{} p={}", p.verdict.f, p.verdict.g, p.verdict.p))
        .collect();
    if !bad.is_empty() {
        return Err(format!("failures: {}", bad.join(", ")));
    }
    let vacuous = if proved.is_empty() { "vacuous, " } else { "" };
    Ok(format!(
        "{vacuous}{} pairs with all hypotheses proved (of {} congruent pairs; the rest reported as unverifiable)",
        proved.len(),
        r.summary.pairs
    ))
}

fn torsion_equality(r: &ScanReport) -> Result<String, String> {
    let proved: Vec<_> = r.pairs().filter(|p| p.conditional_checks_apply).collect();
    if let Some(p) = proved.iter().find(|p| !p.verdict.torsion_equal_at_r) {
        return Err(format!("{}/{} p={} fails", p.verdict.f, p.verdict.g, p.verdict.p));
    }
    let unproved_fail = r.pairs().filter(|p| !p.conditional_checks_apply && !p.verdict.torsion_equal_at_r).count();
    let vacuous = if proved.is_empty() { "vacuous, " } else { "" };
    Ok(format!("{vacuous}{} pairs with hypotheses proved; {unproved_fail} failures logged for pairs with unproved hypotheses", proved.len()))
}

fn divisibility(r: &ScanReport) -> Result<String, String> {
    let mut checked = 0;
    for c in r.curves() {
        if let Some(e) = &c.error {
            return Err(format!("{}: {e}", c.label));
        }
        if let (Some(cio), Some(t)) = (&c.cuspidal_image_order, c.torsion) {
            checked += 1;
            if !BigInt::from(t).is_multiple_of(cio) {
                return Err(format!("{}: image order {cio} does not divide torsion {t}", c.label));
            }
        }
    }
    Ok(format!("{checked} matched rank-0 curves"))
}

fn determinism() -> Result<String, String> {
    let a = scan(11, 300, 1, true).to_jsonl().unwrap();
    let b = scan(11, 300, 2, true).to_jsonl().unwrap();
    if a == b {
        Ok(format!("{} bytes identical with 1 and 2 threads", a.len()))
    } else {
        Err("reports differ".into())
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, t: Instant, r: Result<String, String>| {
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(m) => println!("PASS  {name}: {m} ({secs:.1} s)"),
            Err(m) => {
                failed += 1;
                println!("FAIL  {name}: {m} ({secs:.1} s)");
            }
        }
    };
    let t = Instant::now();
    report("structural suite, N <= 120", t, structural());
    let t = Instant::now();
    report("eichler_shimura on bundled curves", t, eichler_shimura());
    let t = Instant::now();
    report("golden values at N = 11", t, golden_eleven());
    let t = Instant::now();
    let (contain, identity) = match all_rank_pairs() {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    report("winding_in_e for all rank pairs, N <= 500", t, contain);
    report("odd_part_identity for all rank pairs, N <= 500", t, identity);
    let t = Instant::now();
    let r = scan(11, 500, 1, true);
    report("divisibility conditions under proved hypotheses, N <= 500", t, conditional_checks(&r));
    report("torsion_equal_at_r under proved hypotheses, N <= 500", t, torsion_equality(&r));
    report("image order divides torsion for matched curves", t, divisibility(&r));
    let t = Instant::now();
    report("determinism across thread counts, 11..300", t, determinism());
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

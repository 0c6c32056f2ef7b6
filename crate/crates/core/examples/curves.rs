//! Local data, torsion, the matching newform and the analytic order of Sha for a curve.
//!
//! cargo run --release --example curves -- 0 -1 1 -10 -20

use std::sync::Arc;

use modvis::curves::{analyze_curve, bsd_report, match_curve_to_newform, CurveRecord, Weierstrass};
use modvis::{build_space, rational_newforms, winding_data};

fn main() -> modvis::Result<()> {
    let a: Vec<i64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let ainvs: [i64; 5] = a.try_into().unwrap_or([0, -1, 1, -10, -20]);
    let model = Weierstrass::new(ainvs);
    let mut conductor = 1;
    let mut disc = model.discriminant();
    for q in modvis::arith::primes_up_to(10_000) {
        if disc.clone() % q == 0.into() {
            let ld = modvis::curves::tate_local_data(&model, q);
            println!("p={q}: {} {:?}, c={}, f={}", ld.kodaira, ld.reduction, ld.tamagawa, ld.conductor_exponent);
            conductor *= q.pow(ld.conductor_exponent);
            while disc.clone() % q == 0.into() {
                disc /= q;
            }
        }
    }
    let rec = CurveRecord { label: format!("{ainvs:?}"), conductor, ainvs, rank: None, torsion: None };
    let cd = analyze_curve(&rec)?;
    println!("conductor {conductor}, torsion {}, real components {}", cd.torsion, cd.real_components);
    let space = Arc::new(build_space(conductor)?);
    let forms = rational_newforms(&space)?;
    let Some(i) = match_curve_to_newform(&cd, &forms)? else {
        println!("no rational newform matches");
        return Ok(());
    };
    let b = bsd_report(&cd, &forms[i], &winding_data(&space)?)?;
    println!("{}", serde_json::to_string_pretty(&b)?);
    Ok(())
}

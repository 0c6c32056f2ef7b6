//! Rational newforms of a level with their eigenvalues and Atkin-Lehner signs.
//!
//! cargo run --release --example newforms -- 389

use std::sync::Arc;

use modvis::{build_space, rational_newforms};

fn main() -> modvis::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(389);
    let space = Arc::new(build_space(n)?);
    let forms = rational_newforms(&space)?;
    println!("level {n}: {} rational newform(s) in dimension {}", forms.len(), space.dimension());
    for f in &forms {
        let a: Vec<String> = modvis::arith::primes_up_to(29).iter().map(|&l| f.eigenvalue(l).unwrap().to_string()).collect();
        let rank = if f.analytic_rank_is_zero() { "L(f,1) != 0" } else { "L(f,1) = 0" };
        println!("{:<6} w={:?} {rank:<12} a_p: {}", f.label(), f.atkin_lehner_sign(), a.join(" "));
    }
    Ok(())
}

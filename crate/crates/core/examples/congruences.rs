//! Congruences between a rank-zero and a positive-rank newform at one level.
//!
//! cargo run --release --example congruences -- 142

use std::sync::Arc;

use modvis::congruence::{find_visible_pairs, pair_excludes_other_congruences, DEFAULT_SAFETY};
use modvis::{build_space, rational_newforms};

fn main() -> modvis::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(142);
    let space = Arc::new(build_space(n)?);
    let forms = rational_newforms(&space)?;
    let pairs = find_visible_pairs(&forms, 97, DEFAULT_SAFETY)?;
    if pairs.is_empty() {
        println!("level {n}: no congruent pairs");
    }
    for pair in &pairs {
        println!(
            "{} ~ {} mod {} (checked to {}), exclusion: {:?}",
            pair.f.label(),
            pair.g.label(),
            pair.r,
            pair.index_bound,
            pair_excludes_other_congruences(pair)?
        );
    }
    Ok(())
}

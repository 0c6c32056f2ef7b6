//! Full visibility verdict for every congruent pair at a level, as pretty JSON.
//!
//! cargo run --release --example visibility -- 99

use std::sync::Arc;

use modvis::congruence::{find_visible_pairs, DEFAULT_SAFETY};
use modvis::visibility::verify_main_theorem;
use modvis::{build_space, rational_newforms, winding_data};

fn main() -> modvis::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(99);
    let space = Arc::new(build_space(n)?);
    let forms = rational_newforms(&space)?;
    let wd = winding_data(&space)?;
    for pair in find_visible_pairs(&forms, 97, DEFAULT_SAFETY)? {
        let v = verify_main_theorem(&pair, &wd, None)?;
        println!("{}", serde_json::to_string_pretty(&v)?);
        println!("unconditional checks: {}", if v.unconditional_ok() { "ok" } else { "FAILED" });
    }
    Ok(())
}

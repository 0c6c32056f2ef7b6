//! Builds H₁(X₀(N), ℤ) and prints a few Hecke matrices.
//!
//! cargo run --release --example modular_symbols -- 37

use modvis::build_space;

fn main() -> modvis::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(37);
    let space = build_space(n)?;
    println!("level {n}: {} Manin symbols, dim M = {}, genus {}", space.symbols().len(), space.dimension_full(), space.genus());
    println!("cusps: {}", space.num_cusps());
    for l in [2, 3, 5] {
        let t = space.hecke_matrix(l);
        println!("T_{l} (trace {}):", t.matrix.trace());
        for row in t.matrix.row_vecs() {
            let row: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            println!("  [{}]", row.join(" "));
        }
    }
    Ok(())
}

//! Hermite and Smith forms of a small integer matrix, and a lattice index.

use modvis_linalg::hnf::hnf_rows;
use modvis_linalg::{generalized_index, invariant_factors, BigInt, IntegerLattice, IntegerMatrix};

fn main() {
    let rows = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
    let m = IntegerMatrix::from_i64_rows(3, &rows);
    let big: Vec<Vec<BigInt>> = m.row_vecs();
    println!("HNF rows:");
    for r in hnf_rows(big, 3) {
        println!("  {r:?}");
    }
    let inv: Vec<String> = invariant_factors(&m).iter().map(|x| x.to_string()).collect();
    println!("invariant factors: {}", inv.join(", "));
    let l = IntegerLattice::from_i64_generators(3, &rows);
    let full = IntegerLattice::full(3);
    println!("[Z^3 : L] = {}", generalized_index(&full, &l).unwrap());
}

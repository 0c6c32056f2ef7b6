use modvis_linalg::{
    generalized_index, invariant_factors, quotient_invariants, smith_normal_form, BigInt, BigRational, IntegerLattice,
    IntegerMatrix,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols)
        .prop_map(move |v| IntegerMatrix::new(rows, cols, v.into_iter().map(BigInt::from).collect()).unwrap())
}

fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3), 0..12).prop_map(move |ops| {
        let mut m = IntegerMatrix::identity(n);
        for (i, j, q) in ops {
            if i == j {
                continue;
            }
            for c in 0..n {
                let v = m.get(i, c) + m.get(j, c) * BigInt::from(q);
                m.set(i, c, v);
            }
        }
        m
    })
}

fn lattice(n: usize, k: usize) -> impl Strategy<Value = IntegerLattice> {
    prop::collection::vec(prop::collection::vec(-9i64..=9, n), k).prop_map(move |g| IntegerLattice::from_i64_generators(n, &g))
}

fn full_rank_lattice(n: usize) -> impl Strategy<Value = IntegerLattice> {
    lattice(n, n).prop_filter("full rank", move |l| l.rank() == n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_invariant_under_unimodular(m in small_matrix(3, 4), u in unimodular(3), v in unimodular(4)) {
        let twisted = u.mul(&m).unwrap().mul(&v).unwrap();
        prop_assert_eq!(invariant_factors(&m), invariant_factors(&twisted));
    }

    #[test]
    fn snf_transforms_are_consistent(m in small_matrix(3, 3)) {
        let (d, u, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), d.clone());
        prop_assert!(u.determinant().unwrap().abs().is_one());
        let diag = invariant_factors(&m);
        for w in diag.windows(2) {
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn saturate_is_idempotent(l in lattice(4, 3)) {
        let s = l.saturate();
        prop_assert_eq!(s.saturate(), s.clone());
        prop_assert!(l.is_sublattice_of(&s));
        prop_assert_eq!(s.rank(), l.rank());
    }

    #[test]
    fn index_is_multiplicative(a in full_rank_lattice(3), b in full_rank_lattice(3), c in full_rank_lattice(3)) {
        let ab = generalized_index(&a, &b).unwrap();
        let bc = generalized_index(&b, &c).unwrap();
        let ac = generalized_index(&a, &c).unwrap();
        prop_assert_eq!(ab * bc, ac);
    }

    #[test]
    fn invariants_multiply_to_index(a in full_rank_lattice(3), g in lattice(3, 4)) {
        let b = a.intersection(&g.sum(&a.scale(&BigInt::from(6))).unwrap()).unwrap();
        prop_assume!(b.rank() == 3);
        let inv = quotient_invariants(&a, &b).unwrap();
        let prod: BigInt = inv.iter().product();
        prop_assert_eq!(BigRational::from_integer(prod), generalized_index(&a, &b).unwrap());
    }

    #[test]
    fn sum_contains_both(a in lattice(3, 2), b in lattice(3, 2)) {
        let s = a.sum(&b).unwrap();
        prop_assert!(a.is_sublattice_of(&s) && b.is_sublattice_of(&s));
        let i = a.intersection(&b).unwrap();
        prop_assert!(i.is_sublattice_of(&a) && i.is_sublattice_of(&b));
    }
}

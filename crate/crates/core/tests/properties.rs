use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use modvis::arith::{gcd_u, primes_up_to};
use modvis::exact::{parse_rational, rational_to_string};
use modvis::visibility::{odd_part, odd_part_rational};
use modvis::{build_space, rational_newforms, ModSymSpace, RationalNewform};

const LEVELS: [u64; 8] = [11, 26, 37, 43, 57, 58, 77, 91];

fn data() -> &'static Vec<(Arc<ModSymSpace>, Vec<RationalNewform>)> {
    static DATA: OnceLock<Vec<(Arc<ModSymSpace>, Vec<RationalNewform>)>> = OnceLock::new();
    DATA.get_or_init(|| {
        LEVELS
            .iter()
            .map(|&n| {
                let s = Arc::new(build_space(n).unwrap());
                let f = rational_newforms(&s).unwrap();
                (s, f)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = BigRational::new(n.into(), d.into());
        prop_assert_eq!(parse_rational(&rational_to_string(&x)), Some(x));
    }

    #[test]
    fn odd_part_is_multiplicative(a in 1i64..100_000, b in 1i64..100_000, c in 1i64..1000) {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        prop_assert_eq!(odd_part(&(&a * &b)), odd_part(&a) * odd_part(&b));
        let q = BigRational::new(a.clone(), BigInt::from(c));
        prop_assert_eq!(odd_part_rational(&q), BigRational::new(odd_part(&a), odd_part(&BigInt::from(c))));
    }

    #[test]
    fn hecke_multiplicative(i in 0usize..LEVELS.len(), m in 2u64..12, k in 2u64..12) {
        let (space, _) = &data()[i];
        let n = space.level();
        prop_assume!(gcd_u(m, k) == 1);
        let prod = space.hecke_matrix(m).matrix.mul(&space.hecke_matrix(k).matrix).unwrap();
        prop_assert_eq!(&prod, &space.hecke_matrix(m * k).matrix);
        for p in primes_up_to(7) {
            if n % p != 0 {
                let tp = &space.hecke_matrix(p).matrix;
                let rhs = tp.mul(tp).unwrap().sub_scalar(&BigInt::from(p));
                prop_assert_eq!(&space.hecke_matrix(p * p).matrix, &rhs);
            }
        }
    }

    #[test]
    fn eigenvalues_within_hasse_bound(i in 0usize..LEVELS.len(), j in 0usize..30) {
        let (space, forms) = &data()[i];
        let l = primes_up_to(120)[j];
        prop_assume!(space.level() % l != 0);
        for f in forms {
            let a = f.eigenvalue(l).unwrap();
            prop_assert!(a * a <= 4 * l as i64, "{} a_{l} = {a}", f.label());
        }
    }
}

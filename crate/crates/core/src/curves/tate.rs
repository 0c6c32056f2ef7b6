//! Tate's algorithm over ℤ_(q), all Kodaira types, including q = 2 and 3.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::weierstrass::Weierstrass;
use crate::arith::{big_valuation, inv_mod};
use modvis_linalg::modp::reduce_big;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kodaira {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl std::fmt::Display for Kodaira {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl Kodaira {
    /// Number of irreducible components of the special fiber over the algebraic closure.
    pub fn components(&self) -> u32 {
        match self {
            Kodaira::I0 => 1,
            Kodaira::I(n) => *n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::I0Star => 5,
            Kodaira::IStar(n) => n + 5,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    pub prime: u64,
    pub kodaira: Kodaira,
    pub reduction: Reduction,
    /// Tamagawa number c_q.
    pub tamagawa: u64,
    pub conductor_exponent: u32,
    /// v_q of the minimal discriminant.
    pub disc_valuation: u32,
    /// A model minimal at q.
    pub minimal_model: Weierstrass,
}

#[cfg(test)]
impl LocalData {
    fn clone_with_model(&self, model: &Weierstrass) -> Self {
        Self { minimal_model: model.clone(), ..self.clone() }
    }
}

fn v(x: &BigInt, p: u64) -> u32 {
    big_valuation(x, p)
}

fn red(x: &BigInt, p: u64) -> u64 {
    reduce_big(x, p)
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// Whether a·T² + b·T + c has a root in 𝔽_p.
fn quad_has_root(a: &BigInt, b: &BigInt, c: &BigInt, p: u64) -> bool {
    let (a, b, c) = (red(a, p), red(b, p), red(c, p));
    if p == 2 || p == 3 {
        return (0..p).any(|t| (a * t * t + b * t + c) % p == 0);
    }
    if a == 0 {
        return b != 0 || c == 0;
    }
    let p128 = p as u128;
    let d = ((b as u128 * b as u128) % p128 + p128 - (4 * a as u128 * c as u128) % p128) % p128;
    let d = d as i64;
    crate::arith::legendre(d, p) != -1
}

/// Number of roots in 𝔽_p of T³ + bT² + cT + d.
fn cubic_roots(b: &BigInt, c: &BigInt, d: &BigInt, p: u64) -> u64 {
    let (b, c, d) = (red(b, p) as u128, red(c, p) as u128, red(d, p) as u128);
    let p128 = p as u128;
    (0..p as u128).filter(|&t| (((t * t % p128 + b * t) % p128 * t) % p128 + c * t + d) % p128 == 0).count() as u64
}

fn residue(x: &BigInt, p: u64) -> BigInt {
    big(red(x, p))
}

fn inv(a: i64, p: u64) -> BigInt {
    BigInt::from(inv_mod(a, p as i64).expect("unit mod p"))
}

/// Local data at the prime q of an integral model.
pub fn tate_local_data(model: &Weierstrass, q: u64) -> LocalData {
    let p = q;
    let pb = big(p);
    let mut c = model.clone();
    loop {
        let disc = c.discriminant();
        let n = v(&disc, p);
        if n == 0 {
            return LocalData {
                prime: p,
                kodaira: Kodaira::I0,
                reduction: Reduction::Good,
                tamagawa: 1,
                conductor_exponent: 0,
                disc_valuation: 0,
                minimal_model: c,
            };
        }
        // move the singular point to (0, 0)
        let (b2, b4, b6) = (c.b2(), c.b4(), c.b6());
        let (r, t) = if p == 2 {
            if red(&b2, 2) == 0 {
                let r = residue(&c.a4, 2);
                let t = residue(&(&r * (1 + &c.a2 + &c.a4) + &c.a6), 2);
                (r, t)
            } else {
                let r = residue(&c.a3, 2);
                let t = residue(&(&r + &c.a4), 2);
                (r, t)
            }
        } else if p == 3 {
            let r = if red(&b2, 3) == 0 { residue(&-&b6, 3) } else { residue(&-(&b2 * &b4), 3) };
            let t = residue(&(&c.a1 * &r + &c.a3), 3);
            (r, t)
        } else {
            let c4 = c.c4();
            let r = if red(&c4, p) == 0 {
                residue(&(-inv(12, p) * &b2), p)
            } else {
                let den = red(&(12 * &c4), p) as i64;
                residue(&(-inv(den, p) * (c.c6() + &b2 * &c4)), p)
            };
            let t = residue(&(-inv(2, p) * (&c.a1 * &r + &c.a3)), p);
            (r, t)
        };
        c = c.rst_transform(&r, &BigInt::zero(), &t);
        let b2 = c.b2();
        if red(&b2, p) != 0 {
            let split = quad_has_root(&BigInt::one(), &c.a1, &-&c.a2, p);
            let (reduction, cp) = if split {
                (Reduction::SplitMultiplicative, n as u64)
            } else {
                (Reduction::NonsplitMultiplicative, if n % 2 == 0 { 2 } else { 1 })
            };
            return LocalData {
                prime: p,
                kodaira: Kodaira::I(n),
                reduction,
                tamagawa: cp,
                conductor_exponent: 1,
                disc_valuation: n,
                minimal_model: c,
            };
        }
        let additive = |kodaira: Kodaira, cp: u64, f: u32, model: Weierstrass| LocalData {
            prime: p,
            kodaira,
            reduction: Reduction::Additive,
            tamagawa: cp,
            conductor_exponent: f,
            disc_valuation: n,
            minimal_model: model,
        };
        if v(&c.a6, p) < 2 {
            return additive(Kodaira::II, 1, n, c);
        }
        if v(&c.b8(), p) < 3 {
            return additive(Kodaira::III, 2, n - 1, c);
        }
        if v(&c.b6(), p) < 3 {
            let p2 = &pb * &pb;
            let cp = if quad_has_root(&BigInt::one(), &(&c.a3 / &pb), &-(&c.a6 / &p2), p) { 3 } else { 1 };
            return additive(Kodaira::IV, cp, n - 2, c);
        }
        // now p | a1, a2; p² | a3, a4; p³ | a6
        let (s, t) = if p == 2 {
            (residue(&c.a2, 2), 2 * residue(&(&c.a6 / 4), 2))
        } else {
            (residue(&(-&c.a1 * inv(2, p)), p), &pb * residue(&(-(&c.a3 / &pb) * inv(2, p)), p))
        };
        c = c.rst_transform(&BigInt::zero(), &s, &t);
        let p2 = &pb * &pb;
        let p3 = &p2 * &pb;
        let b = &c.a2 / &pb;
        let cc = &c.a4 / &p2;
        let d = &c.a6 / &p3;
        let w = 27 * &d * &d - &b * &b * &cc * &cc + 4 * &b * &b * &b * &d - 18 * &b * &cc * &d + 4 * &cc * &cc * &cc;
        let x = 3 * &cc - &b * &b;
        if red(&w, p) != 0 {
            let cp = 1 + cubic_roots(&b, &cc, &d, p);
            return additive(Kodaira::I0Star, cp, n - 4, c);
        }
        if red(&x, p) != 0 {
            // double root: move it to 0 and run the I_m* subprocedure
            let r = if p == 2 {
                residue(&cc, 2)
            } else if p == 3 {
                residue(&(&b * &cc), 3)
            } else {
                let den = red(&(2 * &x), p) as i64;
                residue(&((&b * &cc - 9 * &d) * inv(den, p)), p)
            };
            c = c.rst_transform(&(&pb * r), &BigInt::zero(), &BigInt::zero());
            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = p2.clone();
            let mut my = p2.clone();
            let cp = loop {
                let a3t = &c.a3 / &my;
                let a6t = &c.a6 / (&mx * &my);
                if red(&(&a3t * &a3t + 4 * &a6t), p) != 0 {
                    break if quad_has_root(&BigInt::one(), &a3t, &-&a6t, p) { 4 } else { 2 };
                }
                let t = if p == 2 { &my * residue(&a6t, 2) } else { &my * residue(&(-&a3t * inv(2, p)), p) };
                c = c.rst_transform(&BigInt::zero(), &BigInt::zero(), &t);
                my *= &pb;
                iy += 1;
                let a2t = &c.a2 / &pb;
                let a4t = &c.a4 / &pb / &mx;
                let a6t = &c.a6 / (&mx * &my);
                if red(&(&a4t * &a4t - 4 * &a6t * &a2t), p) != 0 {
                    break if quad_has_root(&a2t, &a4t, &a6t, p) { 4 } else { 2 };
                }
                let r = if p == 2 {
                    &mx * residue(&(&a6t * &a2t), 2)
                } else {
                    let den = red(&(2 * &a2t), p) as i64;
                    &mx * residue(&(-&a4t * inv(den, p)), p)
                };
                c = c.rst_transform(&r, &BigInt::zero(), &BigInt::zero());
                mx *= &pb;
                ix += 1;
            };
            let m = ix + iy - 5;
            return additive(Kodaira::IStar(m), cp, n + 1 - ix - iy, c);
        }
        // triple root
        let r = if p == 2 {
            residue(&b, 2)
        } else if p == 3 {
            residue(&-&d, 3)
        } else {
            residue(&(-&b * inv(3, p)), p)
        };
        c = c.rst_transform(&(&pb * r), &BigInt::zero(), &BigInt::zero());
        let p4 = &p2 * &p2;
        let x3 = &c.a3 / &p2;
        let x6 = &c.a6 / &p4;
        if red(&(&x3 * &x3 + 4 * &x6), p) != 0 {
            let cp = if quad_has_root(&BigInt::one(), &x3, &-&x6, p) { 3 } else { 1 };
            return additive(Kodaira::IVStar, cp, n - 6, c);
        }
        let t = if p == 2 { residue(&x6, 2) } else { residue(&(&x3 * inv(2, p)), p) };
        c = c.rst_transform(&BigInt::zero(), &BigInt::zero(), &(-&p2 * t));
        if v(&c.a4, p) < 4 {
            return additive(Kodaira::IIIStar, 2, n - 7, c);
        }
        if v(&c.a6, p) < 6 {
            return additive(Kodaira::IIStar, 1, n - 8, c);
        }
        // not minimal at p
        c = c.scale_down(&pb);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_a1() {
        let e = Weierstrass::new([0, -1, 1, -10, -20]);
        let ld = tate_local_data(&e, 11);
        assert_eq!(ld.kodaira, Kodaira::I(5));
        assert_eq!(ld.reduction, Reduction::SplitMultiplicative);
        assert_eq!(ld.tamagawa, 5);
        assert_eq!(ld.conductor_exponent, 1);
        let good = tate_local_data(&e, 7);
        assert_eq!(good.tamagawa, 1);
        assert_eq!(good.kodaira, Kodaira::I0);
    }

    #[test]
    fn additive_at_three() {
        // 27a1: type IV* at 3 with conductor exponent 3
        let ld = tate_local_data(&Weierstrass::new([0, 0, 1, 0, -7]), 3);
        assert_eq!(ld.conductor_exponent, 3);
        assert_eq!(ld.disc_valuation, 9);
        assert_eq!(ld.disc_valuation, ld.conductor_exponent + ld.kodaira.components() - 1);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(400))]
        #[test]
        fn ogg_formula(a in proptest::array::uniform5(-40i64..40), scale in 0u32..3) {
            let base = Weierstrass::new(a);
            proptest::prop_assume!(!base.is_singular());
            // scaling by u = 2^scale·3^scale produces non-minimal models as well
            let u = BigInt::from(6i64.pow(scale));
            let model = Weierstrass::from_big([
                &base.a1 * &u,
                &base.a2 * u.pow(2),
                &base.a3 * u.pow(3),
                &base.a4 * u.pow(4),
                &base.a6 * u.pow(6),
            ]);
            for q in [2u64, 3, 5, 7, 11, 13] {
                let ld = tate_local_data(&model, q);
                let m = ld.kodaira.components();
                proptest::prop_assert_eq!(ld.disc_valuation, ld.conductor_exponent + m - 1, "q = {}, {:?}", q, ld);
                proptest::prop_assert_eq!(&ld, &tate_local_data(&base, q).clone_with_model(&ld.minimal_model));
                let max_f = match q { 2 => 8, 3 => 5, _ => 2 };
                proptest::prop_assert!(ld.conductor_exponent <= max_f);
                proptest::prop_assert!(ld.tamagawa >= 1 && ld.tamagawa <= m.max(4) as u64);
                let mm = &ld.minimal_model;
                proptest::prop_assert_eq!(big_valuation(&mm.discriminant(), q), ld.disc_valuation);
            }
        }
    }

    #[test]
    fn nonminimal_model_is_reduced() {
        // 11a1 scaled by u = 2 (x ↦ 4x, y ↦ 8y) is not minimal at 2
        let e = Weierstrass::new([0, -4, 8, -160, -1280]);
        let ld = tate_local_data(&e, 2);
        assert_eq!(ld.kodaira, Kodaira::I0);
        assert_eq!(ld.disc_valuation, 0);
        let ld11 = tate_local_data(&e, 11);
        assert_eq!(ld11.tamagawa, 5);
    }
}

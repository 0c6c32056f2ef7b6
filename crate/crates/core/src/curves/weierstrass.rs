use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Integral Weierstrass model y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weierstrass {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
}

impl Weierstrass {
    pub fn new(a: [i64; 5]) -> Self {
        Self::from_big(a.map(BigInt::from))
    }

    pub fn from_big(a: [BigInt; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a;
        Self { a1, a2, a3, a4, a6 }
    }

    pub fn ainvs(&self) -> [BigInt; 5] {
        [self.a1.clone(), self.a2.clone(), self.a3.clone(), self.a4.clone(), self.a6.clone()]
    }

    pub fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }

    pub fn b4(&self) -> BigInt {
        &self.a1 * &self.a3 + 2 * &self.a4
    }

    pub fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }

    pub fn b8(&self) -> BigInt {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }

    pub fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }

    pub fn c6(&self) -> BigInt {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * b6
    }

    pub fn discriminant(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant().is_zero()
    }

    /// Number of connected components of E(ℝ).
    pub fn real_components(&self) -> u8 {
        if self.discriminant().is_positive() {
            2
        } else {
            1
        }
    }

    /// The model after x = x′ + r, y = y′ + s·x′ + t.
    pub fn rst_transform(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        Self {
            a1: a1 + 2 * s,
            a2: a2 - s * a1 + 3 * r - s * s,
            a3: a3 + r * a1 + 2 * t,
            a4: a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6: a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        }
    }

    /// Divides a_i by u^i; callers guarantee exactness.
    pub fn scale_down(&self, u: &BigInt) -> Self {
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let div = |x: &BigInt, d: &BigInt| {
            debug_assert!(x.is_multiple_of(d));
            x / d
        };
        Self {
            a1: div(&self.a1, u),
            a2: div(&self.a2, &u2),
            a3: div(&self.a3, &u3),
            a4: div(&self.a4, &u4),
            a6: div(&self.a6, &u6),
        }
    }

    /// Short model Y² = X³ − 27c₄X − 54c₆, with X = 36x + 3b₂ and Y = 108(2y + a₁x + a₃).
    pub fn short_model(&self) -> (BigInt, BigInt) {
        (-27 * self.c4(), -54 * self.c6())
    }

    pub fn reduce(&self, p: u64) -> [u64; 5] {
        self.ainvs().map(|a| modvis_linalg::modp::reduce_big(&a, p))
    }
}

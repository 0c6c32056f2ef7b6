//! Cusps of X₀(N), their Γ₀(N)-equivalence, and continued-fraction conversion of
//! modular symbols {α, β} into Manin symbols.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, inv_mod};

/// A cusp p/q in lowest terms with q ≥ 0; ∞ is 1/0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cusp {
    pub p: i64,
    pub q: i64,
}

impl Cusp {
    pub const INFINITY: Cusp = Cusp { p: 1, q: 0 };
    pub const ZERO: Cusp = Cusp { p: 0, q: 1 };

    pub fn new(p: i64, q: i64) -> Self {
        assert!(p != 0 || q != 0, "0/0 is not a cusp");
        if q == 0 {
            return Self::INFINITY;
        }
        let g = gcd(p, q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        Self { p, q }
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    /// Image under the integer matrix [[a, b], [c, d]] acting by Möbius transformation.
    pub fn act(&self, m: [i64; 4]) -> Self {
        let [a, b, c, d] = m;
        Self::new(a * self.p + b * self.q, c * self.p + d * self.q)
    }
}

/// Cremona's criterion: p₁/q₁ ~ p₂/q₂ under Γ₀(N) iff s₁q₂ ≡ s₂q₁ mod gcd(q₁q₂, N), where pⱼsⱼ ≡ 1 mod qⱼ.
pub fn cusps_equivalent(a: Cusp, b: Cusp, n: i64) -> bool {
    let s = |c: Cusp| -> i64 {
        if c.q == 0 {
            1
        } else {
            inv_mod(c.p, c.q).expect("cusp not in lowest terms")
        }
    };
    let (s1, s2) = (s(a), s(b));
    let m = gcd((a.q as i128 * b.q as i128 % n as i128) as i64, n);
    let m = if m == 0 { n } else { m };
    ((s1 as i128 * b.q as i128 - s2 as i128 * a.q as i128).rem_euclid(m as i128)) == 0
}

/// Representatives of the Γ₀(N)-classes of cusps met so far.
#[derive(Clone, Debug)]
pub struct CuspClasses {
    n: i64,
    reps: Vec<Cusp>,
    by_denominator: std::collections::HashMap<i64, Vec<usize>>,
}

impl CuspClasses {
    pub fn new(n: u64) -> Self {
        Self { n: n as i64, reps: Vec::new(), by_denominator: Default::default() }
    }

    pub fn reps(&self) -> &[Cusp] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    fn key(&self, c: Cusp) -> i64 {
        // gcd(q, N) is a class invariant
        if c.q == 0 {
            self.n
        } else {
            gcd(c.q, self.n)
        }
    }

    pub fn find(&self, c: Cusp) -> Option<usize> {
        let bucket = self.by_denominator.get(&self.key(c))?;
        bucket.iter().copied().find(|&i| cusps_equivalent(self.reps[i], c, self.n))
    }

    pub fn index_or_insert(&mut self, c: Cusp) -> usize {
        if let Some(i) = self.find(c) {
            return i;
        }
        let i = self.reps.len();
        self.reps.push(c);
        self.by_denominator.entry(self.key(c)).or_default().push(i);
        i
    }
}

/// Bottom rows (c, d) of matrices gⱼ ∈ SL₂(ℤ) with {∞, x} = Σⱼ gⱼ{0, ∞}.
pub fn manin_rows_from_infinity(x: Cusp) -> Vec<(i64, i64)> {
    if x.is_infinity() {
        return vec![];
    }
    let (mut a, mut b) = (x.p, x.q);
    // convergents p_j/q_j; q_{-2} = 1, q_{-1} = 0
    let (mut q_prev, mut q_cur) = (1i64, 0i64);
    let mut out = Vec::new();
    let mut j: i64 = 0;
    loop {
        let t = a.div_euclid(b);
        let r = a.rem_euclid(b);
        let q_next = t * q_cur + q_prev;
        let sign = if j % 2 == 0 { -1 } else { 1 };
        out.push((sign * q_next, q_cur));
        q_prev = q_cur;
        q_cur = q_next;
        j += 1;
        if r == 0 {
            break;
        }
        a = b;
        b = r;
    }
    out
}

/// Signed Manin rows for the modular symbol {α, β} = {∞, β} − {∞, α}.
pub fn manin_rows(alpha: Cusp, beta: Cusp) -> Vec<(i64, i64, i64)> {
    let mut out: Vec<(i64, i64, i64)> = manin_rows_from_infinity(beta).into_iter().map(|(c, d)| (c, d, 1)).collect();
    out.extend(manin_rows_from_infinity(alpha).into_iter().map(|(c, d)| (c, d, -1)));
    out
}

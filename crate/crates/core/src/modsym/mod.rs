//! Weight-2 modular symbols for Γ₀(N) and the lattice H₁(X₀(N), ℤ).
//!
//! Conventions (see `docs/CONVENTIONS.md`):
//! * the Manin symbol (c:d) is g·{0, ∞} for any g = [[a, b], [c, d]] ∈ SL₂(ℤ) lifting it;
//! * matrices act on symbols from the right, (c:d)·h = ((c, d)·h);
//! * operators act on row vectors, T(x) = x·[T], so bases are stored as rows;
//! * star is {α, β} ↦ {−α, −β}, i.e. (c:d) ↦ (−c:d).

pub mod cusps;
pub mod heilbronn;
pub mod p1;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use modvis_linalg::{left_kernel_integer, IntegerLattice, IntegerMatrix};

use crate::arith::{gcd, genus_x0, prime_factors};
use crate::error::{Error, Result};
pub use cusps::{Cusp, CuspClasses};
pub use p1::{pone_size, ManinSymbol, P1List};

/// Sparse integer vector: (index, coefficient).
pub type Sparse = Vec<(u32, i64)>;

/// Maximum number of Manin symbols accepted by [`build_space`].
pub const DEFAULT_SYMBOL_BUDGET: u64 = 40_000;

/// Exact matrix of a Hecke operator on the H₁ coordinates of a space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeMatrix {
    pub index: u64,
    pub matrix: IntegerMatrix,
}

/// Element of M (rational relative homology) on a basis vector: a combination Σ numᵢ/den·[symbolᵢ].
#[derive(Clone, Debug)]
struct BasisElement {
    terms: Vec<(u32, i64)>,
    den: i64,
}

pub struct ModSymSpace {
    level: u64,
    p1: P1List,
    /// Coordinates in M of every Manin symbol.
    image: Vec<Sparse>,
    dim_m: usize,
    m_basis: Vec<BasisElement>,
    cusps: CuspClasses,
    /// Boundary of each basis vector of M, as sparse combination of cusp classes.
    boundary: Vec<Sparse>,
    /// Rows: basis of H₁(X₀(N), ℤ) inside M, in Hermite form.
    h1: Vec<Vec<i64>>,
    h1_pivots: Vec<usize>,
    /// For each column of M, its position among the H₁ pivots (u32::MAX if none).
    pivot_pos: Vec<u32>,
    /// Symbol images restricted to pivot columns.
    image_p: Vec<Sparse>,
    star: IntegerMatrix,
    hecke_cache: Mutex<BTreeMap<u64, Arc<HeckeMatrix>>>,
}

impl std::fmt::Debug for ModSymSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModSymSpace").field("level", &self.level).field("dimension", &self.dimension()).finish()
    }
}

fn add_sparse(acc: &mut BTreeMap<u32, BigRational>, key: u32, v: BigRational) {
    let e = acc.entry(key).or_insert_with(BigRational::zero);
    *e += v;
    if e.is_zero() {
        acc.remove(&key);
    }
}

/// Solves the Manin relations over ℚ, returning for each symbol its coordinates (with rational
/// coefficients) on the free generators, the number of free generators, and for each free
/// generator its representing symbol.
fn solve_relations(p1: &P1List) -> (Vec<BTreeMap<u32, BigRational>>, usize, Vec<u32>) {
    let n = p1.len();
    let sigma = |i: usize| {
        let s = p1.symbol(i);
        p1.index_of(s.d as i64, -(s.c as i64)).unwrap()
    };
    let tau = |i: usize| {
        let s = p1.symbol(i);
        p1.index_of(s.d as i64, -(s.c as i64) - s.d as i64).unwrap()
    };
    // two-term relations: x + xσ = 0
    const ZERO: u32 = u32::MAX;
    let mut gen_of = vec![(ZERO, 0i64); n];
    let mut gen_sym: Vec<u32> = Vec::new();
    for i in 0..n {
        let j = sigma(i);
        if i == j {
            gen_of[i] = (ZERO, 0);
        } else if i < j {
            let g = gen_sym.len() as u32;
            gen_sym.push(i as u32);
            gen_of[i] = (g, 1);
            gen_of[j] = (g, -1);
        }
    }
    let ngens = gen_sym.len();
    // three-term relations: x + xτ + xτ² = 0
    let mut seen = vec![false; n];
    let mut relations: Vec<BTreeMap<u32, BigRational>> = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let j = tau(i);
        let k = tau(j);
        seen[i] = true;
        seen[j] = true;
        seen[k] = true;
        let mut rel = BTreeMap::new();
        let orbit: Vec<usize> = if i == j { vec![i] } else { vec![i, j, k] };
        for s in orbit {
            let (g, sgn) = gen_of[s];
            if g != ZERO {
                add_sparse(&mut rel, g, BigRational::from_integer(sgn.into()));
            }
        }
        if !rel.is_empty() {
            relations.push(rel);
        }
    }
    // sparse elimination
    let mut pivot_rel: BTreeMap<u32, BTreeMap<u32, BigRational>> = BTreeMap::new();
    let mut order: Vec<u32> = Vec::new();
    for mut rel in relations {
        loop {
            let Some((&g, c)) = rel.iter().find(|(g, _)| pivot_rel.contains_key(g)) else { break };
            let c = c.clone();
            for (h, v) in &pivot_rel[&g] {
                add_sparse(&mut rel, *h, -(&c * v));
            }
        }
        if rel.is_empty() {
            continue;
        }
        // pivot: smallest |coefficient|, then largest generator
        let (&pg, pc) = rel
            .iter()
            .min_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(b.0.cmp(a.0)))
            .unwrap();
        let pc = pc.clone();
        let normalized: BTreeMap<u32, BigRational> = rel.iter().map(|(h, v)| (*h, v / &pc)).collect();
        pivot_rel.insert(pg, normalized);
        order.push(pg);
    }
    // back substitution: pivot g = -Σ_{h≠g} coef_h · h
    let mut free_index = vec![u32::MAX; ngens];
    let mut free_syms = Vec::new();
    for g in 0..ngens as u32 {
        if !pivot_rel.contains_key(&g) {
            free_index[g as usize] = free_syms.len() as u32;
            free_syms.push(gen_sym[g as usize]);
        }
    }
    let mut expr: Vec<Option<BTreeMap<u32, BigRational>>> = vec![None; ngens];
    for g in 0..ngens {
        if free_index[g] != u32::MAX {
            expr[g] = Some(BTreeMap::from([(free_index[g], BigRational::one())]));
        }
    }
    for &g in order.iter().rev() {
        let mut e = BTreeMap::new();
        for (h, v) in &pivot_rel[&g] {
            if *h == g {
                continue;
            }
            for (k, w) in expr[*h as usize].as_ref().expect("substitution order") {
                add_sparse(&mut e, *k, -(v * w));
            }
        }
        expr[g as usize] = Some(e);
    }
    let images = (0..n)
        .map(|i| {
            let (g, sgn) = gen_of[i];
            if g == ZERO {
                return BTreeMap::new();
            }
            expr[g as usize]
                .as_ref()
                .unwrap()
                .iter()
                .map(|(k, v)| (*k, v * BigRational::from_integer(sgn.into())))
                .collect()
        })
        .collect();
    (images, free_syms.len(), free_syms)
}

/// Builds the space of weight-2 modular symbols for Γ₀(N) with its integral cuspidal lattice.
pub fn build_space(n: u64) -> Result<ModSymSpace> {
    build_space_with_budget(n, DEFAULT_SYMBOL_BUDGET)
}

pub fn build_space_with_budget(n: u64, budget: u64) -> Result<ModSymSpace> {
    if n == 0 {
        return Err(Error::InvalidLevel(n));
    }
    if pone_size(n) > budget {
        return Err(Error::LevelTooLarge { level: n, symbols: pone_size(n), budget });
    }
    let p1 = P1List::new(n);
    let (images_q, dim_m, free_syms) = solve_relations(&p1);

    let integral = images_q.iter().all(|m| m.values().all(|v| v.is_integer()));
    let (image, m_basis): (Vec<Sparse>, Vec<BasisElement>) = if integral {
        let image = images_q
            .iter()
            .map(|m| m.iter().map(|(k, v)| (*k, v.to_integer().to_i64().expect("coefficient size"))).collect())
            .collect();
        let basis = free_syms.iter().map(|&s| BasisElement { terms: vec![(s, 1)], den: 1 }).collect();
        (image, basis)
    } else {
        integral_manin_basis(&images_q, dim_m, &free_syms)
    };

    let mut cusps = CuspClasses::new(n);
    cusps.index_or_insert(Cusp::INFINITY);
    cusps.index_or_insert(Cusp::ZERO);
    let mut boundary = Vec::with_capacity(dim_m);
    for b in &m_basis {
        let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
        for &(s, num) in &b.terms {
            let [a, bb, c, d] = p1.lift(s as usize);
            let plus = cusps.index_or_insert(Cusp::new(a, c)) as u32;
            let minus = cusps.index_or_insert(Cusp::new(bb, d)) as u32;
            *acc.entry(plus).or_default() += num;
            *acc.entry(minus).or_default() -= num;
        }
        let v: Sparse = acc
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|(k, v)| {
                assert!(v % b.den == 0, "non-integral boundary");
                (k, v / b.den)
            })
            .collect();
        boundary.push(v);
    }
    let ncusps = cusps.len();
    let mut delta = IntegerMatrix::zeros(dim_m, ncusps);
    for (i, row) in boundary.iter().enumerate() {
        for &(k, v) in row {
            delta.set(i, k as usize, BigInt::from(v));
        }
    }
    let h1_lattice = if dim_m == 0 { IntegerLattice::zero(0) } else { left_kernel_integer(&delta)? };
    let g = genus_x0(n) as usize;
    if h1_lattice.rank() != 2 * g {
        return Err(Error::Internal(format!(
            "level {n}: cuspidal rank {} but genus formula gives {}",
            h1_lattice.rank(),
            2 * g
        )));
    }
    let h1: Vec<Vec<i64>> = h1_lattice
        .basis_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().expect("H1 basis entry size")).collect())
        .collect();
    let h1_pivots: Vec<usize> = h1.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
    let mut pivot_pos = vec![u32::MAX; dim_m];
    for (i, &p) in h1_pivots.iter().enumerate() {
        pivot_pos[p] = i as u32;
    }
    let image_p = image
        .iter()
        .map(|v| v.iter().filter(|(k, _)| pivot_pos[*k as usize] != u32::MAX).map(|&(k, c)| (pivot_pos[k as usize], c)).collect())
        .collect();
    let mut space = ModSymSpace {
        level: n,
        p1,
        image,
        dim_m,
        m_basis,
        cusps,
        boundary,
        h1,
        h1_pivots,
        pivot_pos,
        image_p,
        star: IntegerMatrix::zeros(0, 0),
        hecke_cache: Mutex::new(BTreeMap::new()),
    };
    space.star = space.operator_from_symbol_map(|sp, s, acc| {
        let sym = sp.p1.symbol(s as usize);
        let t = sp.p1.index_of(-(sym.c as i64), sym.d as i64).unwrap();
        add_p(acc, &sp.image_p[t], 1);
    });
    Ok(space)
}

pub(crate) fn add_p(acc: &mut [i128], v: &Sparse, mult: i64) {
    for &(k, c) in v {
        acc[k as usize] += c as i128 * mult as i128;
    }
}

/// When the symbol images involve denominators, replaces the free generators by a ℤ-basis of
/// the lattice the symbols span.
fn integral_manin_basis(
    images_q: &[BTreeMap<u32, BigRational>],
    dim_m: usize,
    free_syms: &[u32],
) -> (Vec<Sparse>, Vec<BasisElement>) {
    let mut den = BigInt::one();
    for m in images_q {
        for v in m.values() {
            den = den.lcm(v.denom());
        }
    }
    let gens: Vec<Vec<BigInt>> = images_q
        .iter()
        .map(|m| {
            let mut row = vec![BigInt::zero(); dim_m];
            for (k, v) in m {
                row[*k as usize] = v.numer() * (&den / v.denom());
            }
            row
        })
        .collect();
    let lat = IntegerLattice::from_generators(dim_m, gens.clone()).expect("shape");
    let image = gens
        .iter()
        .map(|g| {
            let c = lat.coordinates(g).expect("symbol in its own span");
            c.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (k as u32, x.to_i64().expect("coefficient size")))
                .collect()
        })
        .collect();
    let d = den.to_i64().expect("denominator size");
    let basis = lat
        .basis_rows()
        .iter()
        .map(|row| BasisElement {
            terms: row
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (free_syms[k], x.to_i64().expect("coefficient size")))
                .collect(),
            den: d,
        })
        .collect();
    (image, basis)
}

impl ModSymSpace {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Dimension of the cuspidal space, 2·genus.
    pub fn dimension(&self) -> usize {
        self.h1.len()
    }

    pub fn genus(&self) -> usize {
        self.h1.len() / 2
    }

    /// Dimension of the full space M of modular symbols (cuspidal plus Eisenstein).
    pub fn dimension_full(&self) -> usize {
        self.dim_m
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn symbols(&self) -> &[ManinSymbol] {
        self.p1.symbols()
    }

    pub fn num_cusps(&self) -> usize {
        self.cusps.len()
    }

    pub fn cusp_classes(&self) -> &CuspClasses {
        &self.cusps
    }

    pub fn star_matrix(&self) -> &IntegerMatrix {
        &self.star
    }

    /// H₁(X₀(N), ℤ) in its own coordinates: the full lattice ℤ^{2g}.
    pub fn integral_lattice(&self) -> IntegerLattice {
        IntegerLattice::full(self.dimension())
    }

    /// Basis of H₁(X₀(N), ℤ) as rows in the coordinates of M.
    pub fn h1_basis_in_m(&self) -> IntegerMatrix {
        IntegerMatrix::from_i64_rows(self.dim_m, &self.h1)
    }

    /// Boundary of each basis vector of M as a dense row over cusp classes.
    pub fn boundary_matrix(&self) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(self.dim_m, self.cusps.len());
        for (i, row) in self.boundary.iter().enumerate() {
            for &(k, v) in row {
                m.set(i, k as usize, BigInt::from(v));
            }
        }
        m
    }

    /// Coordinates in M of the Manin symbol with index `i`.
    pub fn symbol_image(&self, i: usize) -> &Sparse {
        &self.image[i]
    }

    /// Index of the Manin symbol (c:d) if it is a point of ℙ¹(ℤ/N).
    pub fn symbol_index(&self, c: i64, d: i64) -> Option<usize> {
        self.p1.index_of(c, d)
    }

    /// Accumulates the pivot-restricted image of {α, β} into `acc` with multiplicity `mult`.
    pub(crate) fn add_modular_symbol_p(&self, alpha: Cusp, beta: Cusp, mult: i64, acc: &mut [i128]) {
        for (c, d, s) in cusps::manin_rows(alpha, beta) {
            let i = self.p1.index_of(c, d).expect("convergent rows are coprime");
            add_p(acc, &self.image_p[i], s * mult);
        }
    }

    /// Accumulates the full M-image of {α, β}.
    pub(crate) fn add_modular_symbol_full(&self, alpha: Cusp, beta: Cusp, mult: i64, acc: &mut [i128]) {
        for (c, d, s) in cusps::manin_rows(alpha, beta) {
            let i = self.p1.index_of(c, d).expect("convergent rows are coprime");
            add_p(acc, &self.image[i], s * mult);
        }
    }

    /// Coordinates in H₁ of a cuspidal vector given by its values on the pivot columns.
    pub(crate) fn solve_pivots(&self, v: &[i128]) -> Vec<i128> {
        let k = self.h1.len();
        let mut x = vec![0i128; k];
        for i in 0..k {
            let p = self.h1_pivots[i];
            let mut acc = v[i];
            for (j, xj) in x.iter().enumerate().take(i) {
                let h = self.h1[j][p];
                if h != 0 {
                    acc -= xj * h as i128;
                }
            }
            let piv = self.h1[i][p] as i128;
            assert!(acc % piv == 0, "vector is not in the integral lattice");
            x[i] = acc / piv;
        }
        x
    }

    /// Rational version of [`Self::solve_pivots`].
    pub fn solve_pivots_rational(&self, v: &[BigRational]) -> Vec<BigRational> {
        let k = self.h1.len();
        let mut x: Vec<BigRational> = Vec::with_capacity(k);
        for i in 0..k {
            let p = self.h1_pivots[i];
            let mut acc = v[i].clone();
            for (j, xj) in x.iter().enumerate() {
                let h = self.h1[j][p];
                if h != 0 {
                    acc -= xj * BigRational::from_integer(h.into());
                }
            }
            x.push(acc / BigRational::from_integer(self.h1[i][p].into()));
        }
        x
    }

    /// Restricts a full M-vector to the pivot columns.
    pub(crate) fn restrict_to_pivots<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.h1_pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// Builds the matrix on H₁ of an operator given by its action on single symbols
    /// (accumulating pivot-restricted images).
    fn operator_from_symbol_map<F>(&self, f: F) -> IntegerMatrix
    where
        F: Fn(&Self, u32, &mut [i128]) + Sync,
    {
        let k = self.h1.len();
        if k == 0 {
            return IntegerMatrix::zeros(0, 0);
        }
        // image of each basis vector of M, restricted to pivots
        let mut used = vec![false; self.dim_m];
        for row in &self.h1 {
            for (j, &x) in row.iter().enumerate() {
                if x != 0 {
                    used[j] = true;
                }
            }
        }
        let mut tb: Vec<Vec<i128>> = vec![Vec::new(); self.dim_m];
        for j in 0..self.dim_m {
            if !used[j] {
                continue;
            }
            let b = &self.m_basis[j];
            let mut acc = vec![0i128; k];
            for &(s, num) in &b.terms {
                let mut part = vec![0i128; k];
                f(self, s, &mut part);
                for (a, p) in acc.iter_mut().zip(&part) {
                    *a += p * num as i128;
                }
            }
            if b.den != 1 {
                for a in acc.iter_mut() {
                    assert!(*a % b.den as i128 == 0, "non-integral operator image");
                    *a /= b.den as i128;
                }
            }
            tb[j] = acc;
        }
        let mut entries = Vec::with_capacity(k * k);
        for row in &self.h1 {
            let mut v = vec![0i128; k];
            for (j, &x) in row.iter().enumerate() {
                if x != 0 {
                    for (a, t) in v.iter_mut().zip(&tb[j]) {
                        *a += *t * x as i128;
                    }
                }
            }
            let coords = self.solve_pivots(&v);
            entries.extend(coords.into_iter().map(BigInt::from));
        }
        IntegerMatrix::new(k, k, entries).unwrap()
    }

    /// Matrix of the operator Σ_h (c:d)·h for a list of integer matrices h.
    pub fn matrix_from_heilbronn(&self, hs: &[[i64; 4]]) -> IntegerMatrix {
        self.operator_from_symbol_map(|sp, s, acc| {
            let sym = sp.p1.symbol(s as usize);
            let (c, d) = (sym.c as i64, sym.d as i64);
            for h in hs {
                if let Some(t) = sp.p1.index_of(c * h[0] + d * h[2], c * h[1] + d * h[3]) {
                    add_p(acc, &sp.image_p[t], 1);
                }
            }
        })
    }

    /// Matrix of Σ_δ {δα, δβ} for left-acting integer matrices δ (coset representatives).
    pub fn matrix_from_cosets(&self, deltas: &[[i64; 4]]) -> IntegerMatrix {
        self.operator_from_symbol_map(|sp, s, acc| {
            let [a, b, c, d] = sp.p1.lift(s as usize);
            let alpha = Cusp::new(b, d);
            let beta = Cusp::new(a, c);
            for &delta in deltas {
                sp.add_modular_symbol_p(alpha.act(delta), beta.act(delta), 1, acc);
            }
        })
    }

    /// Matrix on H₁ of the Atkin–Lehner involution W_N: z ↦ −1/(Nz).
    pub fn atkin_lehner_matrix(&self) -> IntegerMatrix {
        let n = self.level as i64;
        self.matrix_from_cosets(&[[0, -1, n, 0]])
    }

    /// Matrix on H₁ of the Hecke operator T_n (U_q convention at q | N).
    pub fn hecke_matrix(&self, n: u64) -> Arc<HeckeMatrix> {
        assert!(n >= 1, "Hecke index must be positive");
        if let Some(h) = self.hecke_cache.lock().unwrap().get(&n) {
            return h.clone();
        }
        let matrix = self.compute_hecke(n);
        let h = Arc::new(HeckeMatrix { index: n, matrix });
        self.hecke_cache.lock().unwrap().insert(n, h.clone());
        h
    }

    /// Inserts a precomputed Hecke matrix (used by the cache loader).
    pub fn insert_hecke(&self, h: HeckeMatrix) {
        self.hecke_cache.lock().unwrap().insert(h.index, Arc::new(h));
    }

    pub fn cached_hecke_indices(&self) -> Vec<u64> {
        self.hecke_cache.lock().unwrap().keys().copied().collect()
    }

    fn compute_hecke(&self, n: u64) -> IntegerMatrix {
        let k = self.dimension();
        if n == 1 || k == 0 {
            return IntegerMatrix::identity(k);
        }
        let level = self.level;
        let bad: Vec<u64> = prime_factors(n).into_iter().filter(|q| level % q == 0).collect();
        if bad.is_empty() {
            return self.matrix_from_heilbronn(&heilbronn::merel(n));
        }
        let mut m = n;
        let mut result: Option<IntegerMatrix> = None;
        for q in bad {
            let mut e = 0;
            while m % q == 0 {
                m /= q;
                e += 1;
            }
            let uq = if e == 1 { self.compute_u(q) } else { self.hecke_matrix(q).matrix.clone() };
            let mut pw = uq.clone();
            for _ in 1..e {
                pw = pw.mul(&uq).unwrap();
            }
            result = Some(match result {
                None => pw,
                Some(r) => r.mul(&pw).unwrap(),
            });
        }
        let mut r = result.unwrap();
        if m > 1 {
            r = r.mul(&self.hecke_matrix(m).matrix).unwrap();
        }
        r
    }

    fn compute_u(&self, q: u64) -> IntegerMatrix {
        self.matrix_from_cosets(&heilbronn::hecke_cosets(q as i64, false))
    }

    /// Full matrix (dim M × dim M) of T_ℓ on M via Heilbronn matrices (gcd(ℓ, N) = 1) or cosets.
    pub fn hecke_on_m(&self, l: u64) -> Vec<Vec<i128>> {
        let m = self.dim_m;
        let coprime = gcd(l as i64, self.level as i64) == 1;
        let hs = if coprime { Some(heilbronn::merel(l)) } else { None };
        let deltas = heilbronn::hecke_cosets(l as i64, coprime);
        (0..m)
            .map(|j| {
                let b = &self.m_basis[j];
                let mut acc = vec![0i128; m];
                for &(s, num) in &b.terms {
                    match &hs {
                        Some(hs) => {
                            let sym = self.p1.symbol(s as usize);
                            let (c, d) = (sym.c as i64, sym.d as i64);
                            for h in hs.iter() {
                                if let Some(t) = self.p1.index_of(c * h[0] + d * h[2], c * h[1] + d * h[3]) {
                                    add_p(&mut acc, &self.image[t], num);
                                }
                            }
                        }
                        None => {
                            let [a, bb, c, d] = self.p1.lift(s as usize);
                            let (alpha, beta) = (Cusp::new(bb, d), Cusp::new(a, c));
                            for &delta in &deltas {
                                self.add_modular_symbol_full(alpha.act(delta), beta.act(delta), num, &mut acc);
                            }
                        }
                    }
                }
                if b.den != 1 {
                    for a in acc.iter_mut() {
                        assert!(*a % b.den as i128 == 0);
                        *a /= b.den as i128;
                    }
                }
                acc
            })
            .collect()
    }

    /// Matrix of T_ℓ on the divisor group of cusp classes (rows = images of classes).
    pub fn hecke_on_cusps(&self, l: u64) -> Vec<Vec<i64>> {
        let coprime = gcd(l as i64, self.level as i64) == 1;
        let deltas = heilbronn::hecke_cosets(l as i64, coprime);
        let reps = self.cusps.reps().to_vec();
        reps.iter()
            .map(|&c| {
                let mut row = vec![0i64; reps.len()];
                for &delta in &deltas {
                    let i = self.cusps.find(c.act(delta)).expect("cusp class");
                    row[i] += 1;
                }
                row
            })
            .collect()
    }

    /// Boundary of the full M-vector `v` over cusp classes.
    pub fn boundary_of(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.cusps.len()];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(k, c) in &self.boundary[i] {
                out[k as usize] += x * BigRational::from_integer(c.into());
            }
        }
        out
    }

    /// M-coordinates of a modular symbol {α, β}.
    pub fn modular_symbol(&self, alpha: Cusp, beta: Cusp) -> Vec<i128> {
        let mut acc = vec![0i128; self.dim_m];
        self.add_modular_symbol_full(alpha, beta, 1, &mut acc);
        acc
    }

    /// H₁ coordinates of a cuspidal full M-vector (exact; rational allowed).
    pub fn cuspidal_coordinates(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        let x = self.solve_pivots_rational(&self.restrict_to_pivots(v));
        // verify x·H₁ = v
        for j in 0..self.dim_m {
            let mut s = BigRational::zero();
            for (i, xi) in x.iter().enumerate() {
                let h = self.h1[i][j];
                if h != 0 {
                    s += xi * BigRational::from_integer(h.into());
                }
            }
            if s != v[j] {
                return Err(Error::Internal("vector is not cuspidal".into()));
            }
        }
        Ok(x)
    }

    /// Sublattice of star-fixed vectors of `l` (coordinates of H₁).
    pub fn plus_lattice(&self, l: &IntegerLattice) -> Result<IntegerLattice> {
        let img = l.image(&self.star)?;
        if img != *l {
            return Err(Error::NotStarStable);
        }
        Ok(l.fixed_by(&self.star)?)
    }

    /// Sublattice of vectors of `l` negated by star.
    pub fn minus_lattice(&self, l: &IntegerLattice) -> Result<IntegerLattice> {
        let img = l.image(&self.star)?;
        if img != *l {
            return Err(Error::NotStarStable);
        }
        let neg = self.star.scale(&-BigInt::one());
        Ok(l.fixed_by(&neg)?)
    }

    /// Coordinates of the winding element e (the class of {∞, 0} projected to the cuspidal
    /// subspace along the Eisenstein subspace).
    pub fn winding_coordinates(&self) -> Result<Vec<BigRational>> {
        crate::winding::winding_element(self)
    }

    /// Integer images x·T for several H₁ vectors at once.
    pub fn apply(&self, m: &IntegerMatrix, v: &[BigInt]) -> Vec<BigInt> {
        m.vec_mul(v)
    }

    /// The M-basis expansion of the H₁ basis vectors as combinations of symbol indices,
    /// with a common denominator per vector.
    pub fn h1_basis_symbols(&self) -> Vec<(Vec<(u32, i64)>, i64)> {
        self.h1
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
                let mut den = 1i64;
                for b in row.iter().enumerate().filter(|(_, x)| **x != 0).map(|(j, _)| &self.m_basis[j]) {
                    den = den.lcm(&b.den);
                }
                for (j, &x) in row.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let b = &self.m_basis[j];
                    for &(s, num) in &b.terms {
                        *acc.entry(s).or_default() += x * num * (den / b.den);
                    }
                }
                (acc.into_iter().filter(|(_, v)| *v != 0).collect(), den)
            })
            .collect()
    }

    /// Symbol images restricted to pivots (internal use by degeneracy maps).
    pub(crate) fn image_p(&self, i: usize) -> &Sparse {
        &self.image_p[i]
    }

    pub(crate) fn pivot_columns(&self) -> &[usize] {
        &self.h1_pivots
    }

    pub(crate) fn pivot_count(&self) -> usize {
        self.h1_pivots.len()
    }

    #[allow(dead_code)]
    pub(crate) fn pivot_position(&self, col: usize) -> Option<usize> {
        let p = self.pivot_pos[col];
        (p != u32::MAX).then_some(p as usize)
    }

    /// Whether the symbol images needed denominators (never observed in practice; exposed for tests).
    pub fn manin_basis_is_symbols(&self) -> bool {
        self.m_basis.iter().all(|b| b.den == 1 && b.terms.len() == 1 && b.terms[0].1 == 1)
    }
}

/// Convenience: trace of a Hecke matrix as BigInt.
pub fn trace(h: &HeckeMatrix) -> BigInt {
    h.matrix.trace()
}

pub fn is_identity(m: &IntegerMatrix) -> bool {
    *m == IntegerMatrix::identity(m.rows())
}

pub fn abs_max(m: &IntegerMatrix) -> BigInt {
    m.entries().iter().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_small_levels() {
        assert_eq!(build_space(1).unwrap().dimension(), 0);
        assert_eq!(build_space(11).unwrap().dimension(), 2);
        assert_eq!(build_space(37).unwrap().dimension(), 4);
    }

    #[test]
    fn full_dimension_is_cuspidal_plus_boundary() {
        for n in [2u64, 11, 12, 24, 37, 50] {
            let s = build_space(n).unwrap();
            assert_eq!(s.dimension_full(), s.dimension() + s.num_cusps() - 1, "N = {n}");
        }
    }

    #[test]
    fn hecke_traces_level_11() {
        let s = build_space(11).unwrap();
        assert_eq!(trace(&s.hecke_matrix(2)), BigInt::from(-4));
        assert_eq!(trace(&s.hecke_matrix(3)), BigInt::from(-2));
        assert!(is_identity(&s.hecke_matrix(1).matrix));
    }

    #[test]
    fn star_is_involution() {
        let s = build_space(11).unwrap();
        let st = s.star_matrix();
        assert!(is_identity(&st.mul(st).unwrap()));
        let plus = s.plus_lattice(&s.integral_lattice()).unwrap();
        assert_eq!(plus.rank(), 1);
    }
}

//! Rational newforms: integer Hecke eigensystems on the new part of H₁(X₀(N), ℤ).
//!
//! Eigensystems are located by a mod-P search over candidate eigenvalues on the new subspace
//! (the common kernel of the degeneracy maps to levels N/q) and then verified exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use modvis_linalg::factor::large_primes;
use modvis_linalg::modp::{reduce_i64, ModMatrix};
use modvis_linalg::multimodular::{right_kernel_rational, solve_left_rational};
use modvis_linalg::{left_kernel_integer, IntegerLattice, IntegerMatrix};

use crate::arith::{genus_x0, hasse_bound, is_prime_u64, prime_factors, primes_up_to, sturm_bound};
use crate::error::{Error, Result};
use crate::modsym::cusps::manin_rows;
use crate::modsym::heilbronn::{hecke_cosets, merel};
use crate::modsym::{add_p, build_space, Cusp, ModSymSpace};
use crate::winding::eisenstein_annihilator;

/// Largest prime accepted by [`RationalNewform::eigenvalue`].
pub const EIGENVALUE_BUDGET: u64 = 1_000_000;

/// A newform with integer Fourier coefficients, through its homological avatars.
#[derive(Clone, Debug)]
pub struct RationalNewform {
    space: Arc<ModSymSpace>,
    index: usize,
    eigenvalues: BTreeMap<u64, i64>,
    stored_bound: u64,
    sub_lattice: IntegerLattice,
    quotient: IntegerMatrix,
    star_e: IntegerMatrix,
    plus: IntegerLattice,
    atkin_lehner_sign: Option<i64>,
    generators: Vec<u64>,
    functional: Arc<Vec<i128>>,
    anchor: usize,
    rank_zero: bool,
}

/// H₁(E, ℤ) = ℤ² with its star involution, and the surjection π⁎ from H₁(X₀(N), ℤ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologicalE {
    /// n × 2 matrix of π⁎ (x ↦ x·P).
    pub quotient_map: IntegerMatrix,
    pub lattice: IntegerLattice,
    pub plus: IntegerLattice,
    pub star: IntegerMatrix,
}

/// The ideal I_f = (T_ℓ − a_ℓ) acting on H₁: its kernel H₁[I_f] and image I_f·H₁.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotypicData {
    pub generators: Vec<(u64, i64)>,
    pub kernel: IntegerLattice,
    pub image: IntegerLattice,
}

impl RationalNewform {
    pub fn level(&self) -> u64 {
        self.space.level()
    }

    pub fn space(&self) -> &Arc<ModSymSpace> {
        &self.space
    }

    /// Position in the level's ordering (0 for "a", 1 for "b", ...).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Label such as "37b".
    pub fn label(&self) -> String {
        format!("{}{}", self.level(), letters(self.index))
    }

    /// Stored eigenvalues a_ℓ for primes ℓ up to [`Self::stored_bound`].
    pub fn eigenvalues(&self) -> &BTreeMap<u64, i64> {
        &self.eigenvalues
    }

    pub fn stored_bound(&self) -> u64 {
        self.stored_bound
    }

    /// a_ℓ for a prime ℓ, computed on demand past the stored bound.
    pub fn eigenvalue(&self, l: u64) -> Result<i64> {
        if let Some(&a) = self.eigenvalues.get(&l) {
            return Ok(a);
        }
        if l == 1 {
            return Ok(1);
        }
        if !is_prime_u64(l) {
            return Err(Error::InvalidPrime(l));
        }
        if l > EIGENVALUE_BUDGET {
            return Err(Error::BoundExceeded { index: l, budget: EIGENVALUE_BUDGET });
        }
        functional_eigenvalue(&self.space, &self.functional, self.anchor, l)
    }

    /// Fourier coefficient a_n for any n ≥ 1, by multiplicativity.
    pub fn coefficient(&self, n: u64) -> Result<BigInt> {
        let mut out = BigInt::from(1);
        for (q, e) in crate::arith::factor_u64(n) {
            let a = BigInt::from(self.eigenvalue(q)?);
            let bad = self.level() % q == 0;
            let (mut prev, mut cur) = (BigInt::from(1), a.clone());
            for _ in 1..e {
                let next = if bad { &cur * &a } else { &cur * &a - BigInt::from(q) * &prev };
                prev = std::mem::replace(&mut cur, next);
            }
            out *= cur;
        }
        Ok(out)
    }

    pub fn sub_lattice(&self) -> &IntegerLattice {
        &self.sub_lattice
    }

    /// Matrix of π⁎: H₁(X₀(N), ℤ) → H₁(E, ℤ) = ℤ², acting on row vectors.
    pub fn quotient_map(&self) -> &IntegerMatrix {
        &self.quotient
    }

    /// H₁(E, ℤ)⁺ inside ℤ².
    pub fn homological_plus(&self) -> IntegerLattice {
        self.plus.clone()
    }

    pub fn star_on_e(&self) -> &IntegerMatrix {
        &self.star_e
    }

    pub fn atkin_lehner_sign(&self) -> Option<i64> {
        self.atkin_lehner_sign
    }

    /// Primes whose Hecke operators cut out the sub-lattice.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Whether the winding element projects nontrivially to f, i.e. L(f, 1) ≠ 0.
    pub fn analytic_rank_is_zero(&self) -> bool {
        self.rank_zero
    }

    pub fn homological_e(&self) -> HomologicalE {
        HomologicalE {
            quotient_map: self.quotient.clone(),
            lattice: IntegerLattice::full(2),
            plus: self.plus.clone(),
            star: self.star_e.clone(),
        }
    }

    /// Kernel and image of I_f on H₁, with generators T_ℓ − a_ℓ for primes ℓ ≤ Sturm bound.
    pub fn isotypic_data(&self) -> Result<IsotypicData> {
        let n = self.space.dimension();
        let mut gens = Vec::new();
        let mut image = IntegerLattice::zero(n);
        for l in primes_up_to(sturm_bound(self.level()).max(2)) {
            let a = self.eigenvalue(l)?;
            gens.push((l, a));
            let m = self.space.hecke_matrix(l).matrix.sub_scalar(&BigInt::from(a));
            image = image.sum(&IntegerLattice::from_matrix_rows(&m))?;
        }
        Ok(IsotypicData { generators: gens, kernel: self.sub_lattice.clone(), image })
    }
}

/// Free function form of [`RationalNewform::eigenvalue`].
pub fn eigenvalue(f: &RationalNewform, l: u64) -> Result<i64> {
    f.eigenvalue(l)
}

pub fn analytic_rank_is_zero(f: &RationalNewform) -> bool {
    f.analytic_rank_is_zero()
}

pub fn homological_e(f: &RationalNewform) -> HomologicalE {
    f.homological_e()
}

fn letters(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (i % 26) as u8);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

/// Matrix (rows = H₁(N) basis, columns = H₁(M) coordinates) of the map induced by z ↦ t·z
/// from X₀(N) to X₀(M), where t·M divides N.
pub fn degeneracy_matrix(space: &ModSymSpace, lower: &ModSymSpace, t: u64) -> IntegerMatrix {
    let k = lower.pivot_count();
    let rows: Vec<Vec<BigInt>> = space
        .h1_basis_symbols()
        .into_iter()
        .map(|(terms, den)| {
            let mut acc = vec![0i128; k];
            for (s, coeff) in terms {
                if t == 1 {
                    let sym = space.p1().symbol(s as usize);
                    let idx = lower.symbol_index(sym.c as i64, sym.d as i64).expect("symbol reduces to a point of P1");
                    add_p(&mut acc, lower.image_p(idx), coeff);
                } else {
                    let [a, b, c, d] = space.p1().lift(s as usize);
                    let t = t as i64;
                    lower.add_modular_symbol_p(Cusp::new(t * b, d), Cusp::new(t * a, c), coeff, &mut acc);
                }
            }
            if den != 1 {
                for x in acc.iter_mut() {
                    assert!(*x % den as i128 == 0, "non-integral degeneracy image");
                    *x /= den as i128;
                }
            }
            lower.solve_pivots(&acc).into_iter().map(BigInt::from).collect()
        })
        .collect();
    IntegerMatrix::from_rows(lower.dimension(), rows).expect("shape")
}

/// All degeneracy maps to the levels N/q of positive genus, side by side.
pub fn degeneracy_maps(space: &ModSymSpace) -> Result<IntegerMatrix> {
    let n = space.level();
    let mut blocks = Vec::new();
    for q in prime_factors(n) {
        let m = n / q;
        if genus_x0(m) == 0 {
            continue;
        }
        let lower = build_space(m)?;
        blocks.push(degeneracy_matrix(space, &lower, 1));
        blocks.push(degeneracy_matrix(space, &lower, q));
    }
    if blocks.is_empty() {
        return Ok(IntegerMatrix::zeros(space.dimension(), 0));
    }
    let refs: Vec<&IntegerMatrix> = blocks.iter().collect();
    Ok(IntegerMatrix::hstack(&refs)?)
}

/// Basis (mod `p`) of the new subspace of H₁.
pub fn new_subspace_modp(space: &ModSymSpace, degen: &IntegerMatrix, p: u64) -> Vec<Vec<u64>> {
    let n = space.dimension();
    if degen.cols() == 0 {
        return (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    }
    ModMatrix::from_integer(degen, p).left_kernel()
}

struct Node {
    basis: Vec<Vec<u64>>,
    values: Vec<(u64, i64)>,
}

fn combine(coords: &[Vec<u64>], basis: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let width = basis.first().map(|b| b.len()).unwrap_or(0);
    coords
        .iter()
        .map(|c| {
            let mut v = vec![0u128; width];
            for (&x, b) in c.iter().zip(basis) {
                if x == 0 {
                    continue;
                }
                for (o, &y) in v.iter_mut().zip(b) {
                    *o = (*o + x as u128 * y as u128) % p as u128;
                }
            }
            v.into_iter().map(|x| x as u64).collect()
        })
        .collect()
}

fn candidates(n: u64, l: u64) -> Vec<i64> {
    if n % l == 0 {
        vec![-1, 0, 1]
    } else {
        let h = hasse_bound(l);
        (-h..=h).collect()
    }
}

fn exact_kernel(space: &ModSymSpace, degen: &IntegerMatrix, values: &[(u64, i64)]) -> Result<IntegerLattice> {
    let mut blocks: Vec<IntegerMatrix> = Vec::new();
    if degen.cols() > 0 {
        blocks.push(degen.clone());
    }
    for &(l, a) in values {
        blocks.push(space.hecke_matrix(l).matrix.sub_scalar(&BigInt::from(a)));
    }
    let refs: Vec<&IntegerMatrix> = blocks.iter().collect();
    Ok(left_kernel_integer(&IntegerMatrix::hstack(&refs)?)?)
}

/// Eigenvalue of T_ℓ on a nonzero vector v known to be an eigenvector.
fn eigenvalue_on(space: &ModSymSpace, v: &[BigInt], l: u64) -> Result<i64> {
    let img = space.hecke_matrix(l).matrix.vec_mul(v);
    let j = v.iter().position(|x| !x.is_zero()).expect("nonzero vector");
    let (a, r) = img[j].div_rem(&v[j]);
    let ai = a.to_i64().ok_or_else(|| Error::Internal("eigenvalue overflow".into()))?;
    if !r.is_zero() || img.iter().zip(v).any(|(x, y)| *x != y * &a) {
        return Err(Error::Internal(format!("vector is not a T_{l} eigenvector")));
    }
    Ok(ai)
}

/// Finds every rational newform at the level of `space`, storing eigenvalues for primes up to
/// the Sturm bound.
pub fn rational_newforms(space: &Arc<ModSymSpace>) -> Result<Vec<RationalNewform>> {
    rational_newforms_with(space, 0)
}

/// As [`rational_newforms`], storing eigenvalues up to max(Sturm bound, `eigen_bound`).
pub fn rational_newforms_with(space: &Arc<ModSymSpace>, eigen_bound: u64) -> Result<Vec<RationalNewform>> {
    let n = space.level();
    if space.dimension() == 0 {
        return Ok(Vec::new());
    }
    let sturm = sturm_bound(n);
    let p = large_primes(1)[0];
    let degen = degeneracy_maps(space)?;
    let root = new_subspace_modp(space, &degen, p);
    let mut active = vec![Node { basis: root, values: Vec::new() }];
    let mut found: Vec<(Vec<(u64, i64)>, IntegerLattice)> = Vec::new();
    for l in primes_up_to(sturm.max(2)) {
        active.retain(|node| !node.basis.is_empty());
        if active.is_empty() {
            break;
        }
        let tp = ModMatrix::from_integer(&space.hecke_matrix(l).matrix, p);
        let mut next = Vec::new();
        for node in active {
            let restricted = tp.restrict(&node.basis).ok_or_else(|| Error::Internal("subspace is not Hecke-stable".into()))?;
            for a in candidates(n, l) {
                let ker = restricted.sub_scalar(reduce_i64(a, p)).left_kernel();
                if ker.is_empty() {
                    continue;
                }
                let mut values = node.values.clone();
                values.push((l, a));
                next.push(Node { basis: combine(&ker, &node.basis, p), values });
            }
        }
        active = Vec::new();
        for node in next {
            if node.basis.len() == 2 {
                let k = exact_kernel(space, &degen, &node.values)?;
                if k.rank() == 2 {
                    found.push((node.values, k));
                    continue;
                }
            }
            active.push(node);
        }
    }
    if active.iter().any(|node| !node.basis.is_empty()) {
        return Err(Error::Internal(format!("level {n}: eigenspace search did not separate at the Sturm bound")));
    }
    let winding = crate::winding::winding_element(space)?;
    let atkin_lehner = space.atkin_lehner_matrix();
    let ann = eisenstein_annihilator(space)?;
    let tm = space.hecke_on_m(ann.0);
    let bound = sturm.max(eigen_bound);
    let mut forms = found
        .into_iter()
        .map(|(values, sub)| build_form(space, values, sub, bound, &winding, &atkin_lehner, &ann.1, &tm))
        .collect::<Result<Vec<_>>>()?;
    // order by the eigenvalue vector at primes up to the Sturm bound
    forms.sort_by(|f, g| {
        let key = |h: &RationalNewform| h.eigenvalues.range(..=sturm).map(|(_, &a)| a).collect::<Vec<_>>();
        key(f).cmp(&key(g))
    });
    for (i, f) in forms.iter_mut().enumerate() {
        f.index = i;
    }
    Ok(forms)
}

#[allow(clippy::too_many_arguments)]
fn build_form(
    space: &Arc<ModSymSpace>,
    values: Vec<(u64, i64)>,
    sub: IntegerLattice,
    bound: u64,
    winding: &[BigRational],
    atkin_lehner: &IntegerMatrix,
    ann_coeffs: &[BigInt],
    tm: &[Vec<i128>],
) -> Result<RationalNewform> {
    let n = space.level();
    let dim = space.dimension();
    let p = large_primes(1)[0];
    let v = sub.basis_rows()[0].clone();
    // right eigenvectors: add operators until the mod-p kernel is 2-dimensional
    let mut used: Vec<(u64, i64)> = values.clone();
    let stack = |ops: &[(u64, i64)]| -> Result<IntegerMatrix> {
        let blocks: Vec<IntegerMatrix> =
            ops.iter().map(|&(l, a)| space.hecke_matrix(l).matrix.sub_scalar(&BigInt::from(a))).collect();
        let refs: Vec<&IntegerMatrix> = blocks.iter().collect();
        Ok(IntegerMatrix::vstack(&refs)?)
    };
    let right_dim = |m: &IntegerMatrix| dim - ModMatrix::from_integer(m, p).rank();
    let mut m = stack(&used)?;
    let mut extra = primes_up_to(sturm_bound(n).max(2)).into_iter().filter(|l| !values.iter().any(|(q, _)| q == l));
    while right_dim(&m) > 2 {
        let l = extra.next().ok_or_else(|| Error::Internal("right eigenspace did not separate".into()))?;
        used.push((l, eigenvalue_on(space, &v, l)?));
        m = stack(&used)?;
    }
    let cols = right_kernel_rational(&m)?;
    if cols.len() != 2 {
        return Err(Error::Internal("right eigenspace has wrong rank".into()));
    }
    let pt = IntegerLattice::from_generators(dim, cols)?.saturate();
    let quotient = pt.basis().transpose();
    // star on ℤ²: S·P = P·S_E
    let sp = space.star_matrix().mul(&quotient)?;
    let se_t = solve_left_rational(&quotient.transpose(), &sp.transpose())?;
    let star_e = rational_matrix_to_integer(&se_t)?.transpose();
    let plus = IntegerLattice::full(2).fixed_by(&star_e)?;
    let w = atkin_lehner.vec_mul(&v);
    let sign = if w == v {
        Some(1)
    } else if w.iter().zip(&v).all(|(x, y)| *x == -y) {
        Some(-1)
    } else {
        None
    };
    let y = quotient.column(0);
    let functional = eigen_functional(space, &y, ann_coeffs, tm)?;
    let anchor = (0..functional.len())
        .filter(|&i| functional[i] != 0)
        .min_by_key(|&i| (functional[i].unsigned_abs(), i))
        .ok_or_else(|| Error::Internal("eigen-functional vanishes".into()))?;
    let mut eigenvalues = BTreeMap::new();
    for l in primes_up_to(bound.max(2)) {
        eigenvalues.insert(l, functional_eigenvalue(space, &functional, anchor, l)?);
    }
    for &(l, a) in &used {
        if eigenvalues.get(&l) != Some(&a) {
            return Err(Error::Internal(format!("eigenvalue mismatch at {l}")));
        }
    }
    // L(f, 1) ≠ 0 iff e·P ≠ 0
    let rank_zero = (0..2).any(|c| {
        let mut s = BigRational::zero();
        for (x, yv) in winding.iter().zip(quotient.column(c)) {
            s += x * BigRational::from_integer(yv);
        }
        !s.is_zero()
    });
    Ok(RationalNewform {
        space: space.clone(),
        index: 0,
        eigenvalues,
        stored_bound: bound,
        sub_lattice: sub,
        quotient,
        star_e,
        plus,
        atkin_lehner_sign: sign,
        generators: values.iter().map(|&(l, _)| l).collect(),
        functional: Arc::new(functional),
        anchor,
        rank_zero,
    })
}

pub(crate) fn rational_matrix_to_integer(rows: &[Vec<BigRational>]) -> Result<IntegerMatrix> {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let ints = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::Internal("non-integral star action".into())) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegerMatrix::from_rows(cols, ints)?)
}

/// Values on every Manin symbol of a functional φ on M with φ∘T = a_T·φ for all Hecke operators.
///
/// φ(x) = ψ(μ(T_ℓ)x), where ψ reads a cuspidal vector's H₁ coordinates against a right
/// eigenvector y, and μ(T_ℓ) maps M into the cuspidal part.
fn eigen_functional(space: &ModSymSpace, y: &[BigInt], ann_coeffs: &[BigInt], tm: &[Vec<i128>]) -> Result<Vec<i128>> {
    let h1 = space.h1_basis_in_m();
    let k = h1.rows();
    let dim_m = space.dimension_full();
    let hp: Vec<Vec<BigInt>> = (0..k).map(|j| space.restrict_to_pivots(h1.row(j))).collect();
    // H_p·w = y with H_p upper triangular
    let mut w = vec![BigRational::zero(); k];
    for j in (0..k).rev() {
        let mut acc = BigRational::from_integer(y[j].clone());
        for i in j + 1..k {
            if !hp[j][i].is_zero() {
                acc -= &w[i] * BigRational::from_integer(hp[j][i].clone());
            }
        }
        w[j] = acc / BigRational::from_integer(hp[j][j].clone());
    }
    let den = w.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let mut psi = vec![BigInt::zero(); dim_m];
    for (i, &col) in space.pivot_columns().iter().enumerate() {
        psi[col] = (&w[i] * BigRational::from_integer(den.clone())).to_integer();
    }
    let apply = |u: &[BigInt]| -> Vec<BigInt> {
        tm.iter()
            .map(|row| {
                let mut s = BigInt::zero();
                for (&t, x) in row.iter().zip(u) {
                    if t != 0 && !x.is_zero() {
                        s += x * BigInt::from(t);
                    }
                }
                s
            })
            .collect()
    };
    let deg = ann_coeffs.len();
    let mut powers = vec![psi];
    for _ in 0..deg {
        let next = apply(powers.last().unwrap());
        powers.push(next);
    }
    let mut phi = powers[deg].clone();
    for (c, u) in ann_coeffs.iter().zip(&powers) {
        for (x, z) in phi.iter_mut().zip(u) {
            *x -= c * z;
        }
    }
    let g = phi.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(Error::Internal("eigen-functional vanishes".into()));
    }
    let phi: Vec<BigInt> = phi.into_iter().map(|x| x / &g).collect();
    (0..space.symbols().len())
        .map(|t| {
            let mut s = BigInt::zero();
            for &(j, c) in space.symbol_image(t) {
                s += &phi[j as usize] * BigInt::from(c);
            }
            s.to_i128().ok_or_else(|| Error::Internal("eigen-functional overflow".into()))
        })
        .collect()
}

fn functional_eigenvalue(space: &ModSymSpace, vals: &[i128], anchor: usize, l: u64) -> Result<i64> {
    let n = space.level();
    let p1 = space.p1();
    let mut total: i128 = 0;
    if n % l != 0 {
        let sym = p1.symbol(anchor);
        let (c, d) = (sym.c as i64, sym.d as i64);
        for h in merel(l).iter() {
            if let Some(t) = p1.index_of(c * h[0] + d * h[2], c * h[1] + d * h[3]) {
                total += vals[t];
            }
        }
    } else {
        let [a, b, c, d] = p1.lift(anchor);
        let (alpha, beta) = (Cusp::new(b, d), Cusp::new(a, c));
        for delta in hecke_cosets(l as i64, false) {
            for (c2, d2, s) in manin_rows(alpha.act(delta), beta.act(delta)) {
                let t = p1.index_of(c2, d2).expect("convergent rows are coprime");
                total += s as i128 * vals[t];
            }
        }
    }
    let base = vals[anchor];
    if total % base != 0 {
        return Err(Error::Internal(format!("non-integral eigenvalue at {l}")));
    }
    let a = (total / base) as i64;
    let ok = if n % l == 0 { (-1..=1).contains(&a) } else { a.abs() <= hasse_bound(l) };
    if !ok {
        return Err(Error::Internal(format!("eigenvalue {a} at {l} violates its bound")));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(n: u64) -> Vec<RationalNewform> {
        let space = Arc::new(build_space(n).unwrap());
        rational_newforms(&space).unwrap()
    }

    #[test]
    fn level_11() {
        let f = forms(11);
        assert_eq!(f.len(), 1);
        let f = &f[0];
        assert_eq!(f.eigenvalue(2).unwrap(), -2);
        assert_eq!(f.eigenvalue(3).unwrap(), -1);
        assert_eq!(f.eigenvalue(5).unwrap(), 1);
        assert_eq!(f.eigenvalue(7).unwrap(), -2);
        assert_eq!(f.eigenvalue(11).unwrap(), 1);
        assert_eq!(f.eigenvalue(1).unwrap(), 1);
        assert!(f.analytic_rank_is_zero());
        assert_eq!(f.sub_lattice().rank(), 2);
        assert_eq!(f.homological_plus().rank(), 1);
        assert_eq!(f.label(), "11a");
    }

    #[test]
    fn level_37() {
        let f = forms(37);
        assert_eq!(f.len(), 2);
        let mut a2: Vec<i64> = f.iter().map(|g| g.eigenvalue(2).unwrap()).collect();
        a2.sort();
        assert_eq!(a2, vec![-2, 0]);
        for g in &f {
            // the form with a₂ = −2 has rank 1
            assert_eq!(g.analytic_rank_is_zero(), g.eigenvalue(2).unwrap() == 0);
        }
    }

    #[test]
    fn old_forms_excluded() {
        // level 22 carries only the two copies of 11a
        assert!(forms(22).is_empty());
        assert!(forms(1).is_empty());
    }

    #[test]
    fn coefficients_multiply() {
        let f = &forms(11)[0];
        // a₄ = a₂² − 2 = 2, a₆ = a₂a₃ = 2
        assert_eq!(f.coefficient(4).unwrap(), BigInt::from(2));
        assert_eq!(f.coefficient(6).unwrap(), BigInt::from(2));
        assert_eq!(f.coefficient(121).unwrap(), BigInt::from(1));
    }

    #[test]
    fn isotypic_kernel_and_image_are_complementary() {
        for n in [37u64, 43, 53] {
            for f in forms(n) {
                let iso = f.isotypic_data().unwrap();
                assert_eq!(iso.image.rank() + iso.kernel.rank(), f.space().dimension());
                assert_eq!(iso.kernel.intersection(&iso.image).unwrap().rank(), 0);
                // π⁎ kills the image
                let img = iso.image.image(f.quotient_map()).unwrap();
                assert_eq!(img.rank(), 0);
            }
        }
    }

    #[test]
    fn letters_roll_over() {
        assert_eq!(letters(0), "a");
        assert_eq!(letters(25), "z");
        assert_eq!(letters(26), "ba");
    }
}

//! The winding element e, the lattices 𝐓e and ℑe = 𝐓e ∩ H₁(ℤ), the L-ratio index and the
//! cuspidal image order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use modvis_linalg::multimodular::solve_left_rational;
use modvis_linalg::{generalized_index, IntegerLattice, IntegerMatrix};

use crate::arith::{is_prime_u64, sturm_bound};
use crate::error::{Error, Result};
use crate::modsym::{Cusp, ModSymSpace};
use crate::newform::RationalNewform;

/// Smallest prime ℓ ≥ 7 not dividing N; its Eisenstein eigenvalues exceed the Ramanujan bound.
pub fn auxiliary_prime(n: u64) -> u64 {
    (7..).find(|&l| is_prime_u64(l) && n % l != 0).unwrap()
}

/// Finds coefficients c with v_k = Σ c_i v_i if v_k lies in the span of the earlier vectors.
fn dependency(vectors: &[Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let k = vectors.len() - 1;
    let dim = vectors[0].len();
    // columns = vectors 0..k, augmented with v_k; eliminate over ℚ
    let mut rows: Vec<Vec<BigRational>> = (0..dim)
        .map(|j| (0..=k).map(|i| vectors[i][j].clone()).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..dim).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(p, r);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut coeffs = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        coeffs[c] = rows[i][k].clone();
    }
    Some(coeffs)
}

fn vec_times_dense(v: &[BigRational], m: &[Vec<i128>]) -> Vec<BigRational> {
    let n = m.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![BigRational::zero(); n];
    for (x, row) in v.iter().zip(m) {
        if x.is_zero() {
            continue;
        }
        for (o, &a) in out.iter_mut().zip(row) {
            if a != 0 {
                *o += x * BigRational::from_integer(BigInt::from(a));
            }
        }
    }
    out
}

fn krylov_minpoly(m: &[Vec<i128>], v: Vec<BigRational>) -> Vec<BigRational> {
    let mut krylov = vec![v];
    let coeffs = loop {
        let next = vec_times_dense(krylov.last().unwrap(), m);
        krylov.push(next);
        if let Some(c) = dependency(&krylov) {
            break c;
        }
    };
    // monic, low degree first
    let mut poly: Vec<BigRational> = coeffs.into_iter().map(|c| -c).collect();
    poly.push(BigRational::one());
    poly
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_apply(m: &[Vec<i128>], poly: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); v.len()];
    for c in poly.iter().rev() {
        acc = vec_times_dense(&acc, m);
        for (x, y) in acc.iter_mut().zip(v) {
            *x += c * y;
        }
    }
    acc
}

/// The auxiliary prime ℓ and coefficients c of a monic μ(x) = x^k − Σ c_i x^i annihilating T_ℓ
/// on all cusp divisors, so that μ(T_ℓ) maps M into the cuspidal subspace.
pub fn eisenstein_annihilator(space: &ModSymSpace) -> Result<(u64, Vec<BigInt>)> {
    let l = auxiliary_prime(space.level());
    let ncusps = space.cusp_classes().len();
    let tb: Vec<Vec<i128>> =
        space.hecke_on_cusps(l).iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut mu = vec![BigRational::one()];
    for i in 0..ncusps {
        let mut e = vec![BigRational::zero(); ncusps];
        e[i] = BigRational::one();
        let w = poly_apply(&tb, &mu, &e);
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        mu = poly_mul(&mu, &krylov_minpoly(&tb, w));
    }
    let k = mu.len() - 1;
    mu[..k]
        .iter()
        .map(|c| if c.is_integer() { Ok(-c.to_integer()) } else { Err(Error::Internal("non-integral annihilator".into())) })
        .collect::<Result<Vec<_>>>()
        .map(|c| (l, c))
}

/// Like [`eisenstein_annihilator`] but only for the divisor δ{0, ∞} = (∞) − (0).
fn winding_annihilator(space: &ModSymSpace) -> Result<(u64, Vec<BigInt>)> {
    let l = auxiliary_prime(space.level());
    let classes = space.cusp_classes();
    let tb: Vec<Vec<i128>> =
        space.hecke_on_cusps(l).iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut b = vec![BigRational::zero(); classes.len()];
    b[classes.find(Cusp::INFINITY).unwrap()] += BigRational::one();
    b[classes.find(Cusp::ZERO).unwrap()] -= BigRational::one();
    let mu = krylov_minpoly(&tb, b);
    let k = mu.len() - 1;
    mu[..k]
        .iter()
        .map(|c| if c.is_integer() { Ok(-c.to_integer()) } else { Err(Error::Internal("non-integral annihilator".into())) })
        .collect::<Result<Vec<_>>>()
        .map(|c| (l, c))
}

/// H₁ coordinates of e = −(cuspidal projection of {0, ∞}).
///
/// With μ annihilating T_ℓ on cusp divisors, μ(T_ℓ){0, ∞} is cuspidal and equals μ(T_ℓ)·e'
/// where e' is the cuspidal part; μ(T_ℓ) is invertible on the cuspidal space because its roots
/// are Eisenstein eigenvalues.
pub fn winding_element(space: &ModSymSpace) -> Result<Vec<BigRational>> {
    let n = space.level();
    if space.genus() == 0 {
        return Err(Error::GenusZero(n));
    }
    let (l, int_coeffs) = winding_annihilator(space)?;
    let coeffs: Vec<BigRational> = int_coeffs.iter().cloned().map(BigRational::from_integer).collect();
    // μ(x) = x^k − Σ c_i x^i
    let k = coeffs.len();
    let tm = space.hecke_on_m(l);
    let v0: Vec<BigRational> =
        space.modular_symbol(Cusp::ZERO, Cusp::INFINITY).into_iter().map(|x| BigRational::from_integer(x.into())).collect();
    let mut powers = vec![v0];
    for _ in 0..k {
        let next = vec_times_dense(powers.last().unwrap(), &tm);
        powers.push(next);
    }
    let mut w = powers[k].clone();
    for (i, c) in coeffs.iter().enumerate() {
        for (x, y) in w.iter_mut().zip(&powers[i]) {
            *x -= c * y;
        }
    }
    if space.boundary_of(&w).iter().any(|x| !x.is_zero()) {
        return Err(Error::Internal("μ(T){0,∞} is not cuspidal".into()));
    }
    let xw = space.cuspidal_coordinates(&w)?;
    // μ(A) on H₁
    let a = &space.hecke_matrix(l).matrix;
    let dim = space.dimension();
    let mut mu = IntegerMatrix::zeros(dim, dim);
    // Horner: μ(A) = (...((A − c_{k−1})A − c_{k−2})A ...) − c_0
    let mut acc = IntegerMatrix::identity(dim);
    for i in (0..k).rev() {
        acc = acc.mul(a)?.sub(&IntegerMatrix::identity(dim).scale(&int_coeffs[i]))?;
        mu = acc.clone();
    }
    if k == 0 {
        mu = IntegerMatrix::identity(dim);
    }
    let mut den = BigInt::one();
    for x in &xw {
        den = den.lcm(x.denom());
    }
    let rhs: Vec<BigInt> = xw.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let sol = solve_left_rational(&mu, &IntegerMatrix::new(1, dim, rhs)?)?;
    let d = BigRational::from_integer(den);
    Ok(sol[0].iter().map(|x| -(x / &d)).collect())
}

/// Least n ≥ 1 with n·v integral.
pub fn denominator(v: &[BigRational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingData {
    pub level: u64,
    pub e_coords: Vec<BigRational>,
    pub cuspidal_order: BigInt,
    pub te_lattice_scaled: IntegerLattice,
    pub ie_lattice: IntegerLattice,
    /// Hecke indices used to generate 𝐓e.
    pub generation_bound: u64,
    /// Whether doubling the bound left 𝐓e unchanged.
    pub stabilized: bool,
}

impl WindingData {
    /// 𝐓e = (1/n)·`te_lattice_scaled`.
    pub fn te_scale(&self) -> &BigInt {
        &self.cuspidal_order
    }

    /// Index [𝐓e : ℑe].
    pub fn te_ie_index(&self) -> Result<BigInt> {
        let ie_scaled = self.ie_lattice.scale(&self.cuspidal_order);
        let g = generalized_index(&self.te_lattice_scaled, &ie_scaled)?;
        if !g.is_integer() {
            return Err(Error::Internal("ℑe is not contained in 𝐓e".into()));
        }
        Ok(g.to_integer())
    }
}

fn scaled_integer(v: &[BigRational], n: &BigInt) -> Vec<BigInt> {
    v.iter().map(|x| (x * BigRational::from_integer(n.clone())).to_integer()).collect()
}

/// Applies T_k (as matrices built from the prime Hecke matrices) to every vector in `base`,
/// returning T_k·v for k = 1..=bound.
fn hecke_orbit(space: &ModSymSpace, v: &[BigInt], bound: u64) -> Vec<Vec<BigInt>> {
    // T_k v via multiplicativity: T_{ℓ^{j+1}} = T_ℓ T_{ℓ^j} − ℓ T_{ℓ^{j−1}} (ℓ ∤ N), U_q^j (q | N)
    let n = space.level();
    let mut out: Vec<Option<Vec<BigInt>>> = vec![None; bound as usize + 1];
    out[1] = Some(v.to_vec());
    let mut spf = vec![0u64; bound as usize + 1];
    for i in 2..=bound as usize {
        if spf[i] == 0 {
            for j in (i..=bound as usize).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u64;
                }
            }
        }
    }
    for k in 2..=bound {
        let l = spf[k as usize];
        let mut m = k;
        let mut e = 0;
        while m % l == 0 {
            m /= l;
            e += 1;
        }
        let lpow = k / m;
        let tl = &space.hecke_matrix(l).matrix;
        let val = if m > 1 {
            // T_k v = T_{l^e}(T_m v)
            let base = out[m as usize].clone().unwrap();
            apply_prime_power(tl, l, e, &base, n)
        } else {
            let prev = out[(lpow / l) as usize].clone().unwrap();
            let mut r = tl.vec_mul(&prev);
            if n % l != 0 && e >= 2 {
                let prev2 = out[(lpow / l / l) as usize].as_ref().unwrap();
                for (x, y) in r.iter_mut().zip(prev2) {
                    *x -= BigInt::from(l) * y;
                }
            }
            r
        };
        out[k as usize] = Some(val);
    }
    out.into_iter().skip(1).map(|x| x.unwrap()).collect()
}

fn apply_prime_power(tl: &IntegerMatrix, l: u64, e: u32, v: &[BigInt], n: u64) -> Vec<BigInt> {
    let mut prev = v.to_vec();
    let mut cur = tl.vec_mul(v);
    for _ in 1..e {
        let mut next = tl.vec_mul(&cur);
        if n % l != 0 {
            for (x, y) in next.iter_mut().zip(&prev) {
                *x -= BigInt::from(l) * y;
            }
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Default number of Hecke operators used to generate 𝐓e.
pub fn default_generation_bound(n: u64) -> u64 {
    sturm_bound(n).max(30)
}

/// Computes e, 𝐓e and ℑe = 𝐓e ∩ H₁(ℤ).
pub fn winding_data(space: &ModSymSpace) -> Result<WindingData> {
    winding_data_with(space, default_generation_bound(space.level()), true)
}

/// With `check_stabilization`, also verifies that T_k·e ∈ 𝐓e for bound < k ≤ 2·bound.
pub fn winding_data_with(space: &ModSymSpace, bound: u64, check_stabilization: bool) -> Result<WindingData> {
    let e = space.winding_coordinates()?;
    let n = denominator(&e);
    let e_scaled = scaled_integer(&e, &n);
    let total = if check_stabilization { 2 * bound } else { bound };
    let mut orbit = hecke_orbit(space, &e_scaled, total);
    let tail = orbit.split_off(bound as usize);
    let mut te = IntegerLattice::zero(space.dimension());
    for v in orbit {
        if !te.contains(&v) {
            let mut gens = te.basis_rows();
            gens.push(v);
            te = IntegerLattice::from_generators(space.dimension(), gens)?;
        }
    }
    let stabilized = tail.iter().all(|v| te.contains(v));
    // ℑe = (1/n)(te ∩ nℤ^d)
    let dim = space.dimension();
    let nz = IntegerLattice::full(dim).scale(&n);
    let ie = te.intersection(&nz)?.divide_exact(&n).ok_or_else(|| Error::Internal("intersection not divisible".into()))?;
    Ok(WindingData {
        level: space.level(),
        e_coords: e,
        cuspidal_order: n,
        te_lattice_scaled: te,
        ie_lattice: ie,
        generation_bound: bound,
        stabilized,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LRatioReport {
    pub form: String,
    /// None when the projection of e to f vanishes.
    pub lratio: Option<BigRational>,
    pub cuspidal_image_order: Option<BigInt>,
    pub manin_assumption: bool,
    /// Whether den(lratio) divides n² (observational).
    pub denominator_guard: bool,
}

/// Image of a rational vector under π⁎ (x ↦ x·P_f), scaled by n to stay integral.
fn project_scaled(f: &RationalNewform, v_scaled: &[BigInt]) -> Vec<BigInt> {
    f.quotient_map().vec_mul(v_scaled)
}

/// [H₁(E,ℤ)⁺ : π⁎(𝐓e)] and |π⁎(𝐓e)/π⁎(ℑe)|, or None for positive analytic rank.
pub fn lratio_and_image_order(f: &RationalNewform, wd: &WindingData) -> Result<(Option<BigRational>, Option<BigInt>)> {
    let n = &wd.cuspidal_order;
    let te_img = wd.te_lattice_scaled.image(f.quotient_map())?;
    if te_img.rank() == 0 {
        return Ok((None, None));
    }
    let h1e_plus = f.homological_plus();
    // π⁎(𝐓e) = (1/n)·te_img; generalized index scales by n^{rank}
    let idx = generalized_index(&h1e_plus, &te_img)?;
    let scale = BigRational::from_integer(n.pow(te_img.rank() as u32));
    let lratio = idx / scale;
    let ie_img = wd.ie_lattice.image(f.quotient_map())?.scale(n);
    let order = generalized_index(&te_img, &ie_img)?;
    if !order.is_integer() {
        return Err(Error::Internal("π⁎(ℑe) is not contained in π⁎(𝐓e)".into()));
    }
    Ok((Some(lratio), Some(order.to_integer())))
}

/// L-ratio [H₁(E,ℤ)⁺ : π⁎(𝐓e)].
pub fn lratio(f: &RationalNewform, wd: &WindingData) -> Result<Option<BigRational>> {
    Ok(lratio_and_image_order(f, wd)?.0)
}

/// |π⁎(𝐓e)/π⁎(ℑe)|; errors for positive analytic rank.
pub fn cuspidal_image_order(f: &RationalNewform, wd: &WindingData) -> Result<BigInt> {
    lratio_and_image_order(f, wd)?.1.ok_or_else(|| Error::RankNotZero(f.label()))
}

pub fn lratio_report(f: &RationalNewform, wd: &WindingData) -> Result<LRatioReport> {
    let (lr, cio) = lratio_and_image_order(f, wd)?;
    let n = &wd.cuspidal_order;
    let guard = lr.as_ref().map(|x| (n * n).is_multiple_of(x.denom())).unwrap_or(true);
    let manin = f.level() % 4 != 0 && crate::arith::factor_u64(f.level()).iter().all(|&(_, e)| e == 1);
    Ok(LRatioReport {
        form: f.label(),
        lratio: lr,
        cuspidal_image_order: cio,
        manin_assumption: manin,
        denominator_guard: guard,
    })
}

/// The projected winding vector π⁎(n·e), zero iff L(f, 1) = 0.
pub fn projected_winding(f: &RationalNewform, wd: &WindingData) -> Vec<BigInt> {
    project_scaled(f, &scaled_integer(&wd.e_coords, &wd.cuspidal_order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::build_space;
    use crate::newform::rational_newforms;
    use std::sync::Arc;

    #[test]
    fn level_11_golden() {
        let space = Arc::new(build_space(11).unwrap());
        let wd = winding_data(&space).unwrap();
        assert_eq!(wd.cuspidal_order, BigInt::from(5));
        assert!(wd.stabilized);
        assert_eq!(wd.te_ie_index().unwrap(), BigInt::from(5));
        let f = &rational_newforms(&space).unwrap()[0];
        let (lr, cio) = lratio_and_image_order(f, &wd).unwrap();
        assert_eq!(lr.unwrap(), BigRational::new(1.into(), 5.into()));
        assert_eq!(cio.unwrap(), BigInt::from(5));
    }

    #[test]
    fn winding_is_star_fixed() {
        for n in [11u64, 37, 43, 54] {
            let space = build_space(n).unwrap();
            let wd = winding_data(&space).unwrap();
            let fixed = space.plus_lattice(&space.integral_lattice()).unwrap();
            // 𝐓e ⊂ (H₁ ⊗ ℚ)⁺ means n·𝐓e lies in the saturated plus lattice
            assert!(wd.te_lattice_scaled.is_sublattice_of(&fixed), "N = {n}");
            assert!(wd.ie_lattice.is_sublattice_of(&wd.te_lattice_scaled.saturate()));
        }
    }

    #[test]
    fn rank_one_form_has_no_lratio() {
        let space = Arc::new(build_space(37).unwrap());
        let wd = winding_data(&space).unwrap();
        for f in rational_newforms(&space).unwrap() {
            let lr = lratio(&f, &wd).unwrap();
            assert_eq!(lr.is_some(), f.analytic_rank_is_zero());
        }
    }

    #[test]
    fn genus_zero_rejected() {
        let space = build_space(25).unwrap();
        assert!(matches!(winding_data(&space), Err(Error::GenusZero(25))));
    }
}

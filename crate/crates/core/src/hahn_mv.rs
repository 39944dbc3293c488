//! Hahn polynomials on `Z_N^{d+1}`: the product basis `H_nu` with norms
//! `B_nu`, the monic family `Q_alpha`, the projections `Q_{alpha,n}` and the
//! reproducing kernels built from them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_lattice, monic_monomial, multi_pochhammer, pochhammer, HomogeneousLattice, MultiIndex};
use crate::oracle::{LatticeFunction, LatticeMeasure, ProjectionOracle};
use crate::ortho1d::hahn1_scaled;
use crate::scalar::Scalar;

/// The parameter `kappa` (length `d+1`) and lattice size `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HahnParams<S> {
    kappa: Vec<S>,
    big_n: usize,
    relaxed: bool,
}

impl<S: Scalar> HahnParams<S> {
    /// Requires every `kappa_i > -1`.
    pub fn new(kappa: Vec<S>, big_n: usize) -> Result<Self> {
        Self::build(kappa, big_n, false)
    }

    /// Skips the `kappa_i > -1` check, for analytic continuation.
    pub fn relaxed(kappa: Vec<S>, big_n: usize) -> Result<Self> {
        Self::build(kappa, big_n, true)
    }

    /// `kappa = 0` in dimension `d`.
    pub fn zero(d: usize, big_n: usize) -> Self {
        HahnParams {
            kappa: vec![S::zero(); d + 1],
            big_n,
            relaxed: false,
        }
    }

    fn build(kappa: Vec<S>, big_n: usize, relaxed: bool) -> Result<Self> {
        if kappa.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "kappa needs d+1 >= 2 entries, got {}",
                kappa.len()
            )));
        }
        if !relaxed {
            if let Some(k) = kappa.iter().find(|k| !((*k).clone() + S::one()).is_positive()) {
                return Err(Error::InvalidParams(format!("kappa entry {k:?} is not > -1")));
            }
        }
        Ok(HahnParams { kappa, big_n, relaxed })
    }

    pub fn d(&self) -> usize {
        self.kappa.len() - 1
    }

    pub fn kappa(&self) -> &[S] {
        &self.kappa
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// `lambda_kappa = |kappa| + d + 1`.
    pub fn lambda(&self) -> S {
        self.kappa.iter().fold(S::from_usize(self.d() + 1), |acc, k| acc + k.clone())
    }

    /// Same `kappa` on a lattice of another size.
    pub fn with_size(&self, big_n: usize) -> Self {
        HahnParams {
            kappa: self.kappa.clone(),
            big_n,
            relaxed: self.relaxed,
        }
    }

    pub fn kappa_plus_one(&self) -> Vec<S> {
        self.kappa.iter().map(|k| k.clone() + S::one()).collect()
    }

    /// `a_j = |kappa^{j+1}| + 2 |nu^{j+1}| + d - j` for `1 <= j <= d`.
    pub fn a_j(&self, nu: &[usize], j: usize) -> S {
        let d = self.d();
        let kappa_tail = self.kappa[j..].iter().fold(S::zero(), |acc, k| acc + k.clone());
        let nu_tail: usize = nu[j..].iter().sum();
        kappa_tail + S::from_usize(2 * nu_tail + d - j)
    }

    pub fn lattice(&self) -> HomogeneousLattice {
        HomogeneousLattice::new(self.d() + 1, self.big_n).expect("d + 1 >= 2")
    }

    /// The normalized weight `N!/(lambda)_N (kappa+1)_x / x!` on the lattice.
    pub fn measure(&self) -> Result<LatticeMeasure<S>> {
        let lattice = self.lattice();
        let norm = pochhammer(&S::one(), self.big_n) / nonzero(pochhammer(&self.lambda(), self.big_n), 0)?;
        let weights = lattice
            .points()
            .iter()
            .map(|x| Ok(norm.clone() * hahn_weight(x, self)?))
            .collect::<Result<Vec<S>>>()?;
        LatticeMeasure::new(lattice, weights)
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.big_n {
            return Err(Error::DegreeTooHigh {
                degree: n,
                max: self.big_n,
            });
        }
        Ok(())
    }

    fn check_order(&self, n: usize, m: usize) -> Result<()> {
        if n > m || m > self.big_n {
            return Err(Error::DegreeOrderViolation {
                n,
                m,
                big_n: self.big_n,
            });
        }
        Ok(())
    }
}

pub(crate) fn nonzero<S: Scalar>(v: S, term: usize) -> Result<S> {
    if v.is_zero() {
        Err(Error::ZeroDenominator { term })
    } else {
        Ok(v)
    }
}

pub(crate) fn sign<S: Scalar>(n: usize) -> S {
    if n.is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    }
}

pub(crate) fn factorial<S: Scalar>(n: usize) -> S {
    pochhammer(&S::one(), n)
}

pub(crate) fn neg_pochhammer<S: Scalar>(n: usize, k: usize) -> S {
    pochhammer(&-S::from_usize(n), k)
}

pub(crate) fn check_point(x: &MultiIndex, ambient_len: usize, big_n: usize) -> Result<()> {
    if x.len() != ambient_len {
        return Err(Error::LengthMismatch {
            expected: ambient_len,
            got: x.len(),
        });
    }
    if x.degree() != big_n {
        return Err(Error::DegreeMismatch {
            expected: big_n,
            got: x.degree(),
        });
    }
    Ok(())
}

/// The unnormalized weight `(kappa+1)_x / x!`.
pub fn hahn_weight<S: Scalar>(x: &MultiIndex, p: &HahnParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    Ok(multi_pochhammer(&p.kappa_plus_one(), x.parts())? / x.factorial::<S>())
}

/// `<f, g> = N!/(lambda)_N sum_x f(x) g(x) (kappa+1)_x / x!`.
pub fn inner_product<S: Scalar>(f: &LatticeFunction<S>, g: &LatticeFunction<S>, p: &HahnParams<S>) -> Result<S> {
    p.measure()?.inner_product(f, g)
}

/// `H_nu(x; kappa, N)` at an arbitrary point `x` (length `d` or `d+1`; only
/// the first `d` coordinates enter).
///
/// Each univariate factor is `(-M_j)_{nu_j} Q_{nu_j}(x_j; kappa_j, a_j, M_j)`
/// with local size `M_j = N - |x_{j-1}| - |nu^{j+1}|`, so the product stays
/// finite when `M_j < nu_j`.
pub fn hahn_basis_at<S: Scalar>(nu: &MultiIndex, x: &[S], p: &HahnParams<S>) -> Result<S> {
    let d = p.d();
    if nu.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: nu.len(),
        });
    }
    if x.len() < d {
        return Err(Error::LengthMismatch { expected: d, got: x.len() });
    }
    let n = nu.degree();
    p.check_degree(n)?;
    let parts = nu.parts();
    let mut acc = sign::<S>(n) / nonzero(neg_pochhammer::<S>(p.big_n, n), 0)?;
    let mut head = S::zero();
    for j in 1..=d {
        let nj = parts[j - 1];
        let tail: usize = parts[j..].iter().sum();
        let a = p.a_j(parts, j);
        let kj = &p.kappa[j - 1];
        let local = S::from_usize(p.big_n) - head.clone() - S::from_usize(tail);
        let pre = pochhammer(&(kj.clone() + S::one()), nj)
            / nonzero(pochhammer(&(a.clone() + S::one()), nj), j)?;
        acc = acc * pre * hahn1_scaled(nj, &x[j - 1], kj, &a, &local)?;
        if acc.is_zero() {
            return Ok(acc);
        }
        head = head + x[j - 1].clone();
    }
    Ok(acc)
}

/// `H_nu(x; kappa, N)` at a lattice point.
pub fn hahn_basis<S: Scalar>(nu: &MultiIndex, x: &MultiIndex, p: &HahnParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    hahn_basis_at(nu, &x.to_scalars::<S>(), p)
}

/// The closed form of `B_nu(kappa, N) = <H_nu, H_nu>`.
pub fn hahn_norm<S: Scalar>(nu: &MultiIndex, p: &HahnParams<S>) -> Result<S> {
    let d = p.d();
    if nu.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: nu.len(),
        });
    }
    let n = nu.degree();
    p.check_degree(n)?;
    let lambda = p.lambda();
    let big_n = p.big_n;
    let mut acc = sign::<S>(n) * pochhammer(&lambda, big_n + n)
        / nonzero(
            neg_pochhammer::<S>(big_n, n) * pochhammer(&lambda, big_n) * pochhammer(&lambda, 2 * n),
            0,
        )?;
    let parts = nu.parts();
    for j in 1..=d {
        let v = parts[j - 1];
        let a = p.a_j(parts, j);
        let kj = p.kappa[j - 1].clone();
        let ka1 = kj.clone() + a.clone() + S::one();
        let shifted = ka1 + S::from_usize(v);
        acc = acc * pochhammer(&shifted, v) * pochhammer(&(kj + S::one()), v) * factorial::<S>(v)
            / nonzero(pochhammer(&(a + S::one()), v), j)?;
    }
    Ok(acc)
}

/// `B_nu` for every `|nu| = n`, in canonical order.
pub fn hahn_norm_table<S: Scalar>(n: usize, p: &HahnParams<S>) -> Result<Vec<(MultiIndex, S)>> {
    enumerate_lattice(p.d(), n)
        .into_iter()
        .map(|nu| {
            let b = hahn_norm(&nu, p)?;
            Ok((nu, b))
        })
        .collect()
}

/// The monic polynomial `Q_alpha(x) = m_alpha(x) + lower degree terms`,
/// orthogonal to all polynomials of lower degree, at an arbitrary point.
pub fn monic_hahn_at<S: Scalar>(alpha: &MultiIndex, x: &[S], p: &HahnParams<S>) -> Result<S> {
    check_len(alpha, p.d() + 1)?;
    check_len_s(x, p.d() + 1)?;
    let n = alpha.degree();
    p.check_degree(n)?;
    let k1 = p.kappa_plus_one();
    let shift = p.lambda() + S::from_usize(n) - S::one();
    let neg_alpha: Vec<S> = alpha.parts().iter().map(|&a| -S::from_usize(a)).collect();
    let mut total = S::zero();
    for gamma in alpha.below() {
        let g = gamma.degree();
        let mono = monic_monomial(gamma.parts(), x)?;
        if mono.is_zero() {
            continue;
        }
        let num = multi_pochhammer(&neg_alpha, gamma.parts())? * pochhammer(&shift, g) * sign::<S>(g);
        let den = gamma.factorial::<S>() * multi_pochhammer(&k1, gamma.parts())? * neg_pochhammer::<S>(p.big_n, g);
        total = total + num / nonzero(den, g)? * mono;
    }
    let pre = neg_pochhammer::<S>(p.big_n, n) * multi_pochhammer(&k1, alpha.parts())?
        / nonzero(pochhammer(&shift, n), n)?;
    Ok(pre * total)
}

pub fn monic_hahn<S: Scalar>(alpha: &MultiIndex, x: &MultiIndex, p: &HahnParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    monic_hahn_at(alpha, &x.to_scalars::<S>(), p)
}

fn check_len(a: &MultiIndex, len: usize) -> Result<()> {
    if a.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: a.len(),
        });
    }
    Ok(())
}

fn check_len_s<S>(a: &[S], len: usize) -> Result<()> {
    if a.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: a.len(),
        });
    }
    Ok(())
}

/// `G_k = sum_{|g|=k} (-a)_g (-x)_g / (g! prod_i w_i(g_i))` for `k = 0..=n`,
/// read off as coefficients of `prod_i sum_g t^g (-a_i)_g (-x_i)_g / (g! w_i(g))`.
pub(crate) fn pairing_kernels<S, W>(n: usize, a: &[S], x: &[S], weight: W) -> Result<Vec<S>>
where
    S: Scalar,
    W: Fn(usize, usize) -> S,
{
    if a.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: x.len(),
        });
    }
    let mut acc = vec![S::zero(); n + 1];
    acc[0] = S::one();
    for (i, (ai, xi)) in a.iter().zip(x).enumerate() {
        let mut factor = vec![S::zero(); n + 1];
        let mut num = S::one();
        for (g, slot) in factor.iter_mut().enumerate() {
            if g > 0 {
                let gs = S::from_usize(g - 1);
                num = num * (gs.clone() - ai.clone()) * (gs - xi.clone()) / S::from_usize(g);
            }
            if num.is_zero() {
                break;
            }
            *slot = num.clone() / nonzero(weight(i, g), g)?;
        }
        let mut next = vec![S::zero(); n + 1];
        for (u, au) in acc.iter().enumerate() {
            if au.is_zero() {
                continue;
            }
            for (v, fv) in factor.iter().enumerate().take(n + 1 - u) {
                next[u + v] = next[u + v].clone() + au.clone() * fv.clone();
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// `E_k(a, x; kappa)` for `k = 0..=n`.
pub fn e_kernels<S: Scalar>(n: usize, alpha: &[S], x: &[S], kappa: &[S]) -> Result<Vec<S>> {
    check_len_s(kappa, alpha.len())?;
    pairing_kernels(n, alpha, x, |i, g| pochhammer(&(kappa[i].clone() + S::one()), g))
}

/// `E_k(a, x; kappa) = sum_{|g|=k} (-a)_g (-x)_g / (g! (kappa+1)_g)`.
pub fn e_kernel<S: Scalar>(k: usize, alpha: &[S], x: &[S], kappa: &[S]) -> Result<S> {
    Ok(e_kernels(k, alpha, x, kappa)?.pop().expect("k + 1 entries"))
}

/// The constant `C_n(m, N)` in `Q_{alpha,n} = C_n sum_nu H_nu(alpha; m) / B_nu(N) H_nu`.
pub fn c_constant<S: Scalar>(n: usize, m: usize, p: &HahnParams<S>) -> Result<S> {
    p.check_order(n, m)?;
    let l = p.lambda();
    let big_n = p.big_n;
    Ok(sign::<S>(m) * neg_pochhammer::<S>(m, n) * neg_pochhammer::<S>(big_n, m) * pochhammer(&l, big_n + n)
        / nonzero(
            neg_pochhammer::<S>(big_n, n) * pochhammer(&l, big_n) * pochhammer(&l, m + n),
            0,
        )?)
}

/// The constant `D_n(m, N)` of the monic form of the reproducing kernel.
pub fn d_constant<S: Scalar>(n: usize, m: usize, p: &HahnParams<S>) -> Result<S> {
    p.check_order(n, m)?;
    let l = p.lambda();
    let big_n = p.big_n;
    let nm = neg_pochhammer::<S>(big_n, m);
    Ok(neg_pochhammer::<S>(big_n, n) * factorial::<S>(m) * pochhammer(&l, big_n) * pochhammer(&l, m + n)
        / nonzero(
            neg_pochhammer::<S>(m, n) * nm.clone() * nm * pochhammer(&l, big_n + n),
            0,
        )?)
}

/// Per-`k` coefficients of `Q_{alpha,n}` in the `E_k(alpha, x)`.
fn projection_coefficients<S: Scalar>(n: usize, m: usize, p: &HahnParams<S>) -> Result<Vec<S>> {
    let l = p.lambda();
    let big_n = p.big_n;
    let lead = sign::<S>(m) * neg_pochhammer::<S>(big_n, m) / nonzero(pochhammer(&l, m), 0)?;
    if n == 0 {
        return Ok(vec![lead]);
    }
    // (lambda+2n-1)(lambda+n-1)_k / (lambda+n-1) = (lambda+2n-1)(lambda+n)_{k-1} for k >= 1.
    let shift = l.clone() + S::from_usize(n) - S::one();
    let pre = sign::<S>(m) * neg_pochhammer::<S>(big_n, m) * neg_pochhammer::<S>(m, n) * pochhammer(&l, n)
        * (shift.clone() + S::from_usize(n))
        / nonzero(factorial::<S>(n) * pochhammer(&l, m + n), 0)?;
    (0..=n)
        .map(|k| {
            let ratio = if k == 0 {
                S::one() / nonzero(shift.clone(), 0)?
            } else {
                pochhammer(&(shift.clone() + S::one()), k - 1)
            };
            Ok(pre.clone() * neg_pochhammer::<S>(n, k) * ratio
                / nonzero(neg_pochhammer::<S>(m, k) * neg_pochhammer::<S>(big_n, k), k)?)
        })
        .collect()
}

/// `Q_{alpha,n}(x) = proj_{V_n}(m_alpha)(x) / (kappa+1)_alpha` through its
/// expansion in `E_0, ..., E_n`; `|alpha| = m` with `n <= m <= N`.
pub fn monic_projection_at<S: Scalar>(alpha: &MultiIndex, n: usize, x: &[S], p: &HahnParams<S>) -> Result<S> {
    check_len(alpha, p.d() + 1)?;
    check_len_s(x, p.d() + 1)?;
    let m = alpha.degree();
    p.check_order(n, m)?;
    let coef = projection_coefficients(n, m, p)?;
    let e = e_kernels(n, &alpha.to_scalars::<S>(), x, &p.kappa)?;
    Ok(coef
        .into_iter()
        .zip(e)
        .fold(S::zero(), |acc, (c, ek)| acc + c * ek))
}

pub fn monic_projection<S: Scalar>(alpha: &MultiIndex, n: usize, x: &MultiIndex, p: &HahnParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    monic_projection_at(alpha, n, &x.to_scalars::<S>(), p)
}

/// `Q_{alpha,n}` sampled on the whole lattice.
pub fn monic_projection_table<S: Scalar>(alpha: &MultiIndex, n: usize, p: &HahnParams<S>) -> Result<LatticeFunction<S>> {
    LatticeFunction::from_fn(&p.lattice(), |x| monic_projection(alpha, n, x, p))
}

/// A Gram-Schmidt oracle for the Hahn weight, covering degrees `0..=max_degree`.
pub fn hahn_oracle<S: Scalar>(p: &HahnParams<S>, max_degree: usize) -> Result<ProjectionOracle<S>> {
    p.check_degree(max_degree)?;
    ProjectionOracle::new(p.measure()?, max_degree)
}

/// Independent value of `Q_{alpha,n}` on the lattice from the Gram system.
pub fn projection_oracle<S: Scalar>(alpha: &MultiIndex, n: usize, p: &HahnParams<S>) -> Result<LatticeFunction<S>> {
    check_len(alpha, p.d() + 1)?;
    p.check_order(n, alpha.degree())?;
    let oracle = hahn_oracle(p, n)?;
    oracle_monic_projection(&oracle, alpha, n, p)
}

/// `proj_{V_n}(m_alpha)/(kappa+1)_alpha` for any `n` covered by `oracle`.
pub fn oracle_monic_projection<S: Scalar>(
    oracle: &ProjectionOracle<S>,
    alpha: &MultiIndex,
    n: usize,
    p: &HahnParams<S>,
) -> Result<LatticeFunction<S>> {
    p.check_order(n, alpha.degree())?;
    let scale = nonzero(multi_pochhammer(&p.kappa_plus_one(), alpha.parts())?, 0)?;
    oracle.project_monomial(alpha, n, &scale)
}

/// Coefficients `c_beta` with `m_alpha = sum_{beta <= alpha} c_beta Q_beta` on the lattice.
pub fn monomial_to_monic<S: Scalar>(alpha: &MultiIndex, p: &HahnParams<S>) -> Result<Vec<(MultiIndex, S)>> {
    check_len(alpha, p.d() + 1)?;
    let m = alpha.degree();
    p.check_degree(m)?;
    let l = p.lambda();
    let k1 = p.kappa_plus_one();
    let neg_alpha: Vec<S> = alpha.parts().iter().map(|&a| -S::from_usize(a)).collect();
    let common = sign::<S>(m) * neg_pochhammer::<S>(p.big_n, m) * multi_pochhammer(&k1, alpha.parts())?;
    alpha
        .below()
        .into_iter()
        .map(|beta| {
            let b = beta.degree();
            let num = common.clone() * multi_pochhammer(&neg_alpha, beta.parts())? * pochhammer(&l, 2 * b);
            let den = beta.factorial::<S>()
                * neg_pochhammer::<S>(p.big_n, b)
                * multi_pochhammer(&k1, beta.parts())?
                * pochhammer(&l, m + b);
            Ok((beta, num / nonzero(den, b)?))
        })
        .collect()
}

/// Which expansion [`basis_monic_connection`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connection {
    /// `H_nu` (`|nu| = n`) in the `Q_alpha` (`|alpha| = n`).
    BasisInMonic,
    /// `Q_alpha` in the `H_nu`, both of degree `n`.
    MonicInBasis,
    /// `Q_{alpha,n}` (`|alpha| = m`) in the `H_nu` (`|nu| = n`).
    ProjInBasis,
    /// `H_nu` (`|nu| = n`) in the `Q_{alpha,n}` (`|alpha| = m`).
    BasisInProj,
}

/// Row `r` expands as `sum_c entries[r][c] * (function labelled cols[c])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix<S> {
    pub rows: Vec<MultiIndex>,
    pub cols: Vec<MultiIndex>,
    pub entries: Vec<Vec<S>>,
}

impl<S: Scalar> ConnectionMatrix<S> {
    /// Matrix product `self * other`, requiring `self.cols == other.rows`.
    pub fn compose(&self, other: &ConnectionMatrix<S>) -> Result<ConnectionMatrix<S>> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols.len(),
                got: other.rows.len(),
            });
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..other.cols.len())
                    .map(|j| {
                        row.iter()
                            .zip(&other.entries)
                            .fold(S::zero(), |acc, (a, orow)| acc + a.clone() * orow[j].clone())
                    })
                    .collect()
            })
            .collect();
        Ok(ConnectionMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries,
        })
    }
}

/// Connection coefficients between the product basis and the monic
/// families; requires `n <= m <= N` (`m` is unused for the first two kinds).
pub fn basis_monic_connection<S: Scalar>(
    direction: Connection,
    n: usize,
    m: usize,
    p: &HahnParams<S>,
) -> Result<ConnectionMatrix<S>> {
    p.check_order(n, m)?;
    let d = p.d();
    let nus = enumerate_lattice(d, n);
    let k1 = p.kappa_plus_one();
    let big_n = p.big_n;
    let weight = |a: &MultiIndex| -> Result<S> { Ok(multi_pochhammer(&k1, a.parts())? / a.factorial::<S>()) };
    match direction {
        Connection::BasisInMonic => {
            let alphas = enumerate_lattice(d + 1, n);
            let pn = p.with_size(n);
            let c = sign::<S>(n) * factorial::<S>(n) / neg_pochhammer::<S>(big_n, n);
            let entries = nus
                .iter()
                .map(|nu| {
                    alphas
                        .iter()
                        .map(|a| Ok(c.clone() * hahn_basis(nu, a, &pn)? / a.factorial::<S>()))
                        .collect::<Result<Vec<S>>>()
                })
                .collect::<Result<_>>()?;
            Ok(ConnectionMatrix { rows: nus, cols: alphas, entries })
        }
        Connection::MonicInBasis => {
            let alphas = enumerate_lattice(d + 1, n);
            let pn = p.with_size(n);
            let norms = hahn_norm_table(n, &pn)?;
            let c = neg_pochhammer::<S>(big_n, n) * sign::<S>(n) / nonzero(pochhammer(&p.lambda(), n), 0)?;
            let entries = alphas
                .iter()
                .map(|a| {
                    let ca = c.clone() * multi_pochhammer(&k1, a.parts())?;
                    norms
                        .iter()
                        .map(|(nu, b)| Ok(ca.clone() * hahn_basis(nu, a, &pn)? / nonzero(b.clone(), 0)?))
                        .collect::<Result<Vec<S>>>()
                })
                .collect::<Result<_>>()?;
            Ok(ConnectionMatrix { rows: alphas, cols: nus, entries })
        }
        Connection::ProjInBasis => {
            let alphas = enumerate_lattice(d + 1, m);
            let pm = p.with_size(m);
            let norms = hahn_norm_table(n, p)?;
            let c = c_constant(n, m, p)?;
            let entries = alphas
                .iter()
                .map(|a| {
                    norms
                        .iter()
                        .map(|(nu, b)| Ok(c.clone() * hahn_basis(nu, a, &pm)? / nonzero(b.clone(), 0)?))
                        .collect::<Result<Vec<S>>>()
                })
                .collect::<Result<_>>()?;
            Ok(ConnectionMatrix { rows: alphas, cols: nus, entries })
        }
        Connection::BasisInProj => {
            let alphas = enumerate_lattice(d + 1, m);
            let pm = p.with_size(m);
            let c = sign::<S>(m) * factorial::<S>(m) / neg_pochhammer::<S>(big_n, m);
            let entries = nus
                .iter()
                .map(|nu| {
                    alphas
                        .iter()
                        .map(|a| Ok(c.clone() * weight(a)? * hahn_basis(nu, a, &pm)?))
                        .collect::<Result<Vec<S>>>()
                })
                .collect::<Result<_>>()?;
            Ok(ConnectionMatrix { rows: nus, cols: alphas, entries })
        }
    }
}

/// How [`reproducing_kernel`] evaluates `P_n(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    /// `sum_{|nu|=n} H_nu(x) H_nu(y) / B_nu`.
    Basis,
    /// `D_n(m,N) sum_{|alpha|=m} (kappa+1)_alpha/alpha! Q_{alpha,n}(x) Q_{alpha,n}(y)`.
    Monic(usize),
}

/// The reproducing kernel of `V_n` on `Z_N^{d+1}`.
pub fn reproducing_kernel<S: Scalar>(
    n: usize,
    x: &MultiIndex,
    y: &MultiIndex,
    p: &HahnParams<S>,
    via: KernelForm,
) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    check_point(y, p.d() + 1, p.big_n)?;
    match via {
        KernelForm::Basis => {
            p.check_degree(n)?;
            let xs = x.to_scalars::<S>();
            let ys = y.to_scalars::<S>();
            enumerate_lattice(p.d(), n)
                .par_iter()
                .map(|nu| {
                    Ok(hahn_basis_at(nu, &xs, p)? * hahn_basis_at(nu, &ys, p)?
                        / nonzero(hahn_norm(nu, p)?, 0)?)
                })
                .collect::<Result<Vec<S>>>()
                .map(|v| v.into_iter().fold(S::zero(), |a, b| a + b))
        }
        KernelForm::Monic(m) => {
            let dn = d_constant(n, m, p)?;
            let xs = x.to_scalars::<S>();
            let ys = y.to_scalars::<S>();
            let k1 = p.kappa_plus_one();
            let terms = enumerate_lattice(p.d() + 1, m)
                .par_iter()
                .map(|a| {
                    let w = multi_pochhammer(&k1, a.parts())? / a.factorial::<S>();
                    Ok(w * monic_projection_at(a, n, &xs, p)? * monic_projection_at(a, n, &ys, p)?)
                })
                .collect::<Result<Vec<S>>>()?;
            Ok(dn * terms.into_iter().fold(S::zero(), |a, b| a + b))
        }
    }
}

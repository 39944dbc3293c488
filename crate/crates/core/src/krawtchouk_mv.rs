//! Krawtchouk polynomials on `Z_N^{d+1}` for the multinomial weight, their
//! monic projections and kernels, and the bridge from the Hahn family as
//! `kappa = t * rho` grows.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hahn_mv::{check_point, factorial, neg_pochhammer, nonzero, pairing_kernels, sign, HahnParams, KernelForm};
use crate::lattice::{enumerate_lattice, monic_monomial, multi_pochhammer, HomogeneousLattice, MultiIndex};
use crate::oracle::{LatticeFunction, LatticeMeasure, ProjectionOracle};
use crate::ortho1d::krawtchouk1_scaled;
use crate::scalar::Scalar;

/// Probabilities `rho` (length `d`) with `rho_i > 0`, `|rho| < 1`, and the
/// lattice size `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrawParams<S> {
    rho: Vec<S>,
    big_n: usize,
}

impl<S: Scalar> KrawParams<S> {
    pub fn new(rho: Vec<S>, big_n: usize) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidParams("rho needs d >= 1 entries".into()));
        }
        if let Some(r) = rho.iter().find(|r| !r.is_positive()) {
            return Err(Error::InvalidParams(format!("rho entry {r:?} is not positive")));
        }
        let total = rho.iter().fold(S::zero(), |a, r| a + r.clone());
        if !(S::one() - total.clone()).is_positive() {
            return Err(Error::InvalidParams(format!("|rho| = {total:?} must be below 1")));
        }
        Ok(KrawParams { rho, big_n })
    }

    pub fn d(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[S] {
        &self.rho
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    /// `(rho, 1 - |rho|)`.
    pub fn bold_rho(&self) -> Vec<S> {
        let mut v = self.rho.clone();
        v.push(self.tail(self.d()));
        v
    }

    /// `1 - |rho_j| = 1 - rho_1 - ... - rho_j`.
    fn tail(&self, j: usize) -> S {
        self.rho[..j].iter().fold(S::one(), |a, r| a - r.clone())
    }

    pub fn with_size(&self, big_n: usize) -> Self {
        KrawParams {
            rho: self.rho.clone(),
            big_n,
        }
    }

    pub fn lattice(&self) -> HomogeneousLattice {
        HomogeneousLattice::new(self.d() + 1, self.big_n).expect("d + 1 >= 2")
    }

    /// The multinomial weight `N! rho^x / x!`, which sums to one.
    pub fn measure(&self) -> Result<LatticeMeasure<S>> {
        let lattice = self.lattice();
        let nf = factorial::<S>(self.big_n);
        let weights = lattice
            .points()
            .iter()
            .map(|x| Ok(nf.clone() * kraw_weight(x, self)?))
            .collect::<Result<Vec<S>>>()?;
        LatticeMeasure::new(lattice, weights)
    }

    /// The Hahn parameters `kappa = t * bold_rho` whose `t -> infinity` limit
    /// gives this family.
    pub fn hahn_limit_params(&self, t: &S) -> Result<HahnParams<S>> {
        HahnParams::new(self.bold_rho().into_iter().map(|r| r * t.clone()).collect(), self.big_n)
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

fn pow_signed<S: Scalar>(base: &S, e: i64) -> S {
    if e >= 0 {
        base.powu(e as usize)
    } else {
        S::one() / base.powu((-e) as usize)
    }
}

/// The unnormalized weight `bold_rho^x / x!`.
pub fn kraw_weight<S: Scalar>(x: &MultiIndex, p: &KrawParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    let br = p.bold_rho();
    let num = br
        .iter()
        .zip(x.parts())
        .fold(S::one(), |a, (r, &xi)| a * r.powu(xi));
    Ok(num / x.factorial::<S>())
}

/// `<f, g> = sum_x f(x) g(x) N! bold_rho^x / x!`.
pub fn kraw_inner_product<S: Scalar>(f: &LatticeFunction<S>, g: &LatticeFunction<S>, p: &KrawParams<S>) -> Result<S> {
    p.measure()?.inner_product(f, g)
}

/// `K_nu(x; rho, N)` at an arbitrary point (only the first `d` coordinates enter).
pub fn kraw_basis_at<S: Scalar>(nu: &MultiIndex, x: &[S], p: &KrawParams<S>) -> Result<S> {
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
        let rj = p.rho[j - 1].clone();
        let local = S::from_usize(p.big_n) - head.clone() - S::from_usize(tail);
        let prob = rj.clone() / p.tail(j - 1);
        let pre = (rj / p.tail(j)).powu(nj);
        acc = acc * pre * krawtchouk1_scaled(nj, &x[j - 1], &prob, &local)?;
        if acc.is_zero() {
            return Ok(acc);
        }
        head = head + x[j - 1].clone();
    }
    Ok(acc)
}

pub fn kraw_basis<S: Scalar>(nu: &MultiIndex, x: &MultiIndex, p: &KrawParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    kraw_basis_at(nu, &x.to_scalars::<S>(), p)
}

/// The closed form of `C_nu(rho, N) = <K_nu, K_nu>`, with `nu_{d+1} = 0`.
pub fn kraw_norm<S: Scalar>(nu: &MultiIndex, p: &KrawParams<S>) -> Result<S> {
    let d = p.d();
    if nu.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: nu.len(),
        });
    }
    let n = nu.degree();
    p.check_degree(n)?;
    let parts = nu.parts();
    let mut acc = sign::<S>(n) / nonzero(neg_pochhammer::<S>(p.big_n, n), 0)?;
    for j in 1..=d {
        let v = parts[j - 1];
        let next = if j < d { parts[j] } else { 0 };
        acc = acc * factorial::<S>(v) * p.rho[j - 1].powu(v) / pow_signed(&p.tail(j), v as i64 - next as i64);
    }
    Ok(acc)
}

/// `F_k(a, x; rho)` for `k = 0..=n`.
pub fn f_kernels<S: Scalar>(n: usize, alpha: &[S], x: &[S], rho: &[S]) -> Result<Vec<S>> {
    let mut bold = rho.to_vec();
    bold.push(rho.iter().fold(S::one(), |a, r| a - r.clone()));
    if bold.len() != alpha.len() {
        return Err(Error::LengthMismatch {
            expected: alpha.len(),
            got: bold.len(),
        });
    }
    pairing_kernels(n, alpha, x, |i, g| bold[i].powu(g))
}

/// `F_k(a, x; rho) = sum_{|g|=k} (-a)_g (-x)_g / (g! bold_rho^g)`.
pub fn f_kernel<S: Scalar>(k: usize, alpha: &[S], x: &[S], rho: &[S]) -> Result<S> {
    Ok(f_kernels(k, alpha, x, rho)?.pop().expect("k + 1 entries"))
}

/// The monic Krawtchouk polynomial `L_alpha = m_alpha + lower degree terms`.
pub fn monic_kraw_at<S: Scalar>(alpha: &MultiIndex, x: &[S], p: &KrawParams<S>) -> Result<S> {
    if alpha.len() != p.d() + 1 || x.len() != p.d() + 1 {
        return Err(Error::LengthMismatch {
            expected: p.d() + 1,
            got: alpha.len().min(x.len()),
        });
    }
    let n = alpha.degree();
    p.check_degree(n)?;
    let br = p.bold_rho();
    let neg_alpha: Vec<S> = alpha.parts().iter().map(|&a| -S::from_usize(a)).collect();
    let rho_pow = |g: &MultiIndex| br.iter().zip(g.parts()).fold(S::one(), |a, (r, &e)| a * r.powu(e));
    let mut total = S::zero();
    for gamma in alpha.below() {
        let g = gamma.degree();
        let mono = monic_monomial(gamma.parts(), x)?;
        if mono.is_zero() {
            continue;
        }
        let num = multi_pochhammer(&neg_alpha, gamma.parts())? * sign::<S>(g);
        let den = gamma.factorial::<S>() * rho_pow(&gamma) * neg_pochhammer::<S>(p.big_n, g);
        total = total + num / nonzero(den, g)? * mono;
    }
    Ok(neg_pochhammer::<S>(p.big_n, n) * rho_pow(alpha) * total)
}

pub fn monic_kraw<S: Scalar>(alpha: &MultiIndex, x: &MultiIndex, p: &KrawParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    monic_kraw_at(alpha, &x.to_scalars::<S>(), p)
}

/// `L_{alpha,n} = proj_{V_n}(m_alpha) / bold_rho^alpha` through its expansion in
/// `F_0, ..., F_n`; `|alpha| = m` with `n <= m <= N`.
pub fn monic_kraw_projection_at<S: Scalar>(alpha: &MultiIndex, n: usize, x: &[S], p: &KrawParams<S>) -> Result<S> {
    if alpha.len() != p.d() + 1 || x.len() != p.d() + 1 {
        return Err(Error::LengthMismatch {
            expected: p.d() + 1,
            got: alpha.len().min(x.len()),
        });
    }
    let m = alpha.degree();
    p.check_order(n, m)?;
    let big_n = p.big_n;
    let pre = sign::<S>(m) * neg_pochhammer::<S>(big_n, m) * neg_pochhammer::<S>(m, n) / factorial::<S>(n);
    let f = f_kernels(n, &alpha.to_scalars::<S>(), x, &p.rho)?;
    let mut total = S::zero();
    for (k, fk) in f.into_iter().enumerate() {
        let c = neg_pochhammer::<S>(n, k) / nonzero(neg_pochhammer::<S>(m, k) * neg_pochhammer::<S>(big_n, k), k)?;
        total = total + c * fk;
    }
    Ok(pre * total)
}

pub fn monic_kraw_projection<S: Scalar>(alpha: &MultiIndex, n: usize, x: &MultiIndex, p: &KrawParams<S>) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    monic_kraw_projection_at(alpha, n, &x.to_scalars::<S>(), p)
}

pub fn monic_kraw_projection_table<S: Scalar>(alpha: &MultiIndex, n: usize, p: &KrawParams<S>) -> Result<LatticeFunction<S>> {
    LatticeFunction::from_fn(&p.lattice(), |x| monic_kraw_projection(alpha, n, x, p))
}

pub fn kraw_oracle<S: Scalar>(p: &KrawParams<S>, max_degree: usize) -> Result<ProjectionOracle<S>> {
    p.check_degree(max_degree)?;
    ProjectionOracle::new(p.measure()?, max_degree)
}

/// `proj_{V_n}(m_alpha)/bold_rho^alpha` from a prebuilt oracle.
pub fn oracle_kraw_projection<S: Scalar>(
    oracle: &ProjectionOracle<S>,
    alpha: &MultiIndex,
    n: usize,
    p: &KrawParams<S>,
) -> Result<LatticeFunction<S>> {
    p.check_order(n, alpha.degree())?;
    let br = p.bold_rho();
    let scale = br.iter().zip(alpha.parts()).fold(S::one(), |a, (r, &e)| a * r.powu(e));
    oracle.project_monomial(alpha, n, &scale)
}

pub fn kraw_projection_oracle<S: Scalar>(alpha: &MultiIndex, n: usize, p: &KrawParams<S>) -> Result<LatticeFunction<S>> {
    p.check_order(n, alpha.degree())?;
    let oracle = kraw_oracle(p, n)?;
    oracle_kraw_projection(&oracle, alpha, n, p)
}

/// The constant `(-N)_n m! / ((-m)_n [(-N)_m]^2)` of the monic kernel form.
pub fn kraw_kernel_constant<S: Scalar>(n: usize, m: usize, p: &KrawParams<S>) -> Result<S> {
    p.check_order(n, m)?;
    let nm = neg_pochhammer::<S>(p.big_n, m);
    Ok(neg_pochhammer::<S>(p.big_n, n) * factorial::<S>(m)
        / nonzero(neg_pochhammer::<S>(m, n) * nm.clone() * nm, 0)?)
}

/// The reproducing kernel of `V_n` for the Krawtchouk weight.
pub fn kraw_reproducing_kernel<S: Scalar>(
    n: usize,
    x: &MultiIndex,
    y: &MultiIndex,
    p: &KrawParams<S>,
    via: KernelForm,
) -> Result<S> {
    check_point(x, p.d() + 1, p.big_n)?;
    check_point(y, p.d() + 1, p.big_n)?;
    let xs = x.to_scalars::<S>();
    let ys = y.to_scalars::<S>();
    let terms = match via {
        KernelForm::Basis => {
            p.check_degree(n)?;
            enumerate_lattice(p.d(), n)
                .par_iter()
                .map(|nu| {
                    Ok(kraw_basis_at(nu, &xs, p)? * kraw_basis_at(nu, &ys, p)? / nonzero(kraw_norm(nu, p)?, 0)?)
                })
                .collect::<Result<Vec<S>>>()?
        }
        KernelForm::Monic(m) => {
            let c = kraw_kernel_constant(n, m, p)?;
            let pm = p.bold_rho();
            enumerate_lattice(p.d() + 1, m)
                .par_iter()
                .map(|a| {
                    let w = pm.iter().zip(a.parts()).fold(S::one(), |acc, (r, &e)| acc * r.powu(e))
                        / a.factorial::<S>();
                    Ok(c.clone()
                        * w
                        * monic_kraw_projection_at(a, n, &xs, p)?
                        * monic_kraw_projection_at(a, n, &ys, p)?)
                })
                .collect::<Result<Vec<S>>>()?
        }
    };
    Ok(terms.into_iter().fold(S::zero(), |a, b| a + b))
}

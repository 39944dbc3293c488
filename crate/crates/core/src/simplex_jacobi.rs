//! Orthogonal polynomials on the simplex `T^d`: the Jacobi product basis
//! `P_nu`, the monic family `R_alpha`, and exact checks of the identities that
//! tie them to the Hahn polynomials on `Z_N^{d+1}`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hahn_mv::{hahn_basis, hahn_norm, monic_hahn, HahnParams};
use crate::lattice::{enumerate_lattice, multi_pochhammer, pochhammer, power_monomial, MultiIndex};
use crate::scalar::Scalar;

/// A point `x` in `R^d`, evaluated on or off the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint<S> {
    x: Vec<S>,
}

impl<S: Scalar> SimplexPoint<S> {
    pub fn new(x: Vec<S>) -> Self {
        SimplexPoint { x }
    }

    pub fn coords(&self) -> &[S] {
        &self.x
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }

    /// `1 - |x|`.
    pub fn remainder(&self) -> S {
        self.x.iter().fold(S::one(), |acc, v| acc - v.clone())
    }

    /// Homogeneous coordinates `X = (x, 1 - |x|)`.
    pub fn homogeneous(&self) -> Vec<S> {
        let mut out = self.x.clone();
        out.push(self.remainder());
        out
    }

    /// Membership in `T^d`: `x_i >= 0` and `|x| <= 1`.
    pub fn in_simplex(&self) -> bool {
        self.homogeneous().iter().all(|v| !(-v.clone()).is_positive())
    }

    /// `s_j = 1 - |x_{j-1}|` for `j = 1..=d+1`.
    fn chain(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.x.len() + 1);
        let mut s = S::one();
        out.push(s.clone());
        for v in &self.x {
            s = s - v.clone();
            out.push(s.clone());
        }
        out
    }
}

/// `Gamma(numer) / prod Gamma(denoms)`, kept unevaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRatio<S> {
    pub numer: S,
    pub denoms: Vec<S>,
}

impl GammaRatio<crate::scalar::Rational> {
    /// The exact value when every argument is a positive integer.
    pub fn to_rational(&self) -> Option<crate::scalar::Rational> {
        use num_traits::ToPrimitive;
        let as_count = |v: &crate::scalar::Rational| -> Option<usize> {
            if v.is_integer() && v.numer().sign() == num_bigint::Sign::Plus {
                v.to_integer().to_usize()
            } else {
                None
            }
        };
        let fact = |k: usize| pochhammer(&crate::scalar::Rational::from_int(1), k);
        let mut acc = fact(as_count(&self.numer)? - 1);
        for d in &self.denoms {
            acc /= fact(as_count(d)? - 1);
        }
        Some(acc)
    }
}

/// The weight `W_kappa(x) = x^{kappa'} (1-|x|)^{kappa_{d+1}}` on `T^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeight<S> {
    kappa: Vec<S>,
}

impl<S: Scalar> SimplexWeight<S> {
    /// Requires `kappa_i > -1` and `d >= 1`.
    pub fn new(kappa: Vec<S>) -> Result<Self> {
        if kappa.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "kappa needs d+1 >= 2 entries, got {}",
                kappa.len()
            )));
        }
        if let Some(k) = kappa.iter().find(|k| !((*k).clone() + S::one()).is_positive()) {
            return Err(Error::InvalidParams(format!("kappa entry {k:?} is not > -1")));
        }
        Ok(SimplexWeight { kappa })
    }

    pub fn kappa(&self) -> &[S] {
        &self.kappa
    }

    pub fn d(&self) -> usize {
        self.kappa.len() - 1
    }

    /// `|kappa| + d + 1`.
    pub fn lambda(&self) -> S {
        self.kappa.iter().fold(S::from_usize(self.d() + 1), |acc, k| acc + k.clone())
    }

    /// The constant `w_kappa` making `<1, 1> = 1`.
    pub fn normalization(&self) -> GammaRatio<S> {
        GammaRatio {
            numer: self.lambda(),
            denoms: self.kappa.iter().map(|k| k.clone() + S::one()).collect(),
        }
    }

    fn a_j(&self, nu: &[usize], j: usize) -> S {
        let d = self.d();
        let kappa_tail = self.kappa[j..].iter().fold(S::zero(), |acc, k| acc + k.clone());
        let nu_tail: usize = nu[j..].iter().sum();
        kappa_tail + S::from_usize(2 * nu_tail + d - j)
    }

    fn hahn(&self, big_n: usize) -> Result<HahnParams<S>> {
        HahnParams::new(self.kappa.clone(), big_n)
    }

    fn check_nu(&self, nu: &MultiIndex) -> Result<()> {
        if nu.len() != self.d() {
            return Err(Error::LengthMismatch {
                expected: self.d(),
                got: nu.len(),
            });
        }
        Ok(())
    }

    fn check_point(&self, x: &SimplexPoint<S>) -> Result<()> {
        if x.d() != self.d() {
            return Err(Error::LengthMismatch {
                expected: self.d(),
                got: x.d(),
            });
        }
        Ok(())
    }
}

/// Coefficients `(-n)_k (n+a+b+1)_k / ((a+1)_k k!)` of the normalized Jacobi
/// polynomial in powers of `(1-t)/2`.
fn jacobi_coefficients<S: Scalar>(n: usize, a: &S, b: &S) -> Result<Vec<S>> {
    let shift = S::from_usize(n + 1) + a.clone() + b.clone();
    let mut out = Vec::with_capacity(n + 1);
    let mut c = S::one();
    out.push(c.clone());
    for k in 0..n {
        let ks = S::from_usize(k);
        let den = (a.clone() + S::one() + ks.clone()) * S::from_usize(k + 1);
        if den.is_zero() {
            return Err(Error::ZeroDenominator { term: k + 1 });
        }
        c = c * (ks.clone() - S::from_usize(n)) * (shift.clone() + ks) / den;
        out.push(c.clone());
    }
    Ok(out)
}

/// `P_nu^kappa(x)`, defined everywhere.
///
/// Each factor is multiplied out as the homogeneous polynomial
/// `sum_k c_k s_{j+1}^k s_j^{nu_j - k}` in `s_j = 1 - |x_{j-1}|`, and the
/// powers of `s_j` cancel between neighbouring factors, so no division occurs.
pub fn simplex_jacobi_eval<S: Scalar>(nu: &MultiIndex, x: &SimplexPoint<S>, w: &SimplexWeight<S>) -> Result<S> {
    w.check_nu(nu)?;
    w.check_point(x)?;
    let parts = nu.parts();
    let s = x.chain();
    let mut acc = S::one();
    for j in 1..=w.d() {
        let n = parts[j - 1];
        let coeffs = jacobi_coefficients(n, &w.a_j(parts, j), &w.kappa[j - 1])?;
        let factor = coeffs.iter().enumerate().fold(S::zero(), |sum, (k, c)| {
            sum + c.clone() * s[j].powu(k) * s[j - 1].powu(n - k)
        });
        acc = acc * factor;
    }
    Ok(acc)
}

/// `P_nu^kappa(x)` through the quotient form: ratio factors times
/// `P^{(a_j, kappa_j)}_{nu_j}(2 x_j / s_j - 1) / P^{(a_j, kappa_j)}_{nu_j}(1)`.
///
/// Fails with `ChainSingularity` where some `s_j = 0`; use
/// [`simplex_jacobi_eval`] there.
pub fn simplex_jacobi_direct<S: Scalar>(nu: &MultiIndex, x: &SimplexPoint<S>, w: &SimplexWeight<S>) -> Result<S> {
    w.check_nu(nu)?;
    w.check_point(x)?;
    let parts = nu.parts();
    let s = x.chain();
    let mut acc = S::one();
    for j in 1..=w.d() {
        if s[j - 1].is_zero() {
            return Err(Error::ChainSingularity { position: j });
        }
        let tail: usize = parts[j..].iter().sum();
        let t = S::from_int(2) * x.x[j - 1].clone() / s[j - 1].clone() - S::one();
        let jac = crate::ortho1d::jacobi1_normalized(parts[j - 1], &t, &w.a_j(parts, j), &w.kappa[j - 1])?;
        acc = acc * (s[j].clone() / s[j - 1].clone()).powu(tail) * jac;
    }
    Ok(acc)
}

/// The closed form of `<P_nu, P_nu>_{W_kappa}`.
pub fn simplex_jacobi_norm<S: Scalar>(nu: &MultiIndex, w: &SimplexWeight<S>) -> Result<S> {
    w.check_nu(nu)?;
    let parts = nu.parts();
    let mut acc = S::one() / pochhammer(&w.lambda(), 2 * nu.degree());
    for j in 1..=w.d() {
        let v = parts[j - 1];
        let a = w.a_j(parts, j);
        let kj = w.kappa[j - 1].clone();
        let ka1 = kj.clone() + a.clone() + S::one();
        let den = pochhammer(&(a + S::one()), v);
        if den.is_zero() {
            return Err(Error::ZeroDenominator { term: j });
        }
        let shifted = ka1 + S::from_usize(v);
        acc = acc * pochhammer(&shifted, v) * pochhammer(&(kj + S::one()), v) * pochhammer(&S::one(), v) / den;
    }
    Ok(acc)
}

/// The monic polynomial `R_alpha^kappa(x) = X^alpha + lower degree terms`,
/// with `alpha` of length `d+1`.
pub fn monic_simplex_eval<S: Scalar>(alpha: &MultiIndex, x: &SimplexPoint<S>, w: &SimplexWeight<S>) -> Result<S> {
    w.check_point(x)?;
    homogeneous_monic(alpha, &x.homogeneous(), w)
}

/// `R_alpha` written in the homogeneous variables `X`, which need not sum to 1.
fn homogeneous_monic<S: Scalar>(alpha: &MultiIndex, big_x: &[S], w: &SimplexWeight<S>) -> Result<S> {
    if alpha.len() != w.d() + 1 {
        return Err(Error::LengthMismatch {
            expected: w.d() + 1,
            got: alpha.len(),
        });
    }
    let n = alpha.degree();
    let kp1: Vec<S> = w.kappa.iter().map(|k| k.clone() + S::one()).collect();
    let neg_alpha: Vec<S> = alpha.parts().iter().map(|&a| -S::from_usize(a)).collect();
    let shift = w.lambda() + S::from_usize(n) - S::one();
    let mut total = S::zero();
    for gamma in alpha.below() {
        let den = multi_pochhammer(&kp1, gamma.parts())? * gamma.factorial::<S>();
        if den.is_zero() {
            return Err(Error::ZeroDenominator { term: gamma.degree() });
        }
        total = total
            + multi_pochhammer(&neg_alpha, gamma.parts())? * pochhammer(&shift, gamma.degree())
                * power_monomial(gamma.parts(), big_x)
                / den;
    }
    let lead = pochhammer(&shift, n);
    if lead.is_zero() {
        return Err(Error::ZeroDenominator { term: n });
    }
    Ok(crate::hahn_mv::sign::<S>(n) * multi_pochhammer(&kp1, alpha.parts())? * total / lead)
}

/// Outcome of an exact or floating identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// Number of scalar identities compared.
    pub checks: usize,
    /// Largest absolute residual, as a float.
    pub max_residual: f64,
    /// Whether every residual is exactly zero.
    pub exact_zero: bool,
}

impl IdentityReport {
    fn from_residuals<S: Scalar>(residuals: &[S]) -> Self {
        IdentityReport {
            checks: residuals.len(),
            max_residual: residuals.iter().map(|r| r.to_float().abs()).fold(0.0, f64::max),
            exact_zero: residuals.iter().all(|r| r.is_zero()),
        }
    }

    /// Exact zero for exact scalars, otherwise within `tol`.
    pub fn passed(&self, exact: bool, tol: f64) -> bool {
        if exact {
            self.exact_zero
        } else {
            self.max_residual <= tol
        }
    }
}

/// Checks both connection identities between `P_nu` and `R_alpha` at degree
/// `n` on every sample point:
/// `P_nu = sum_alpha n!/alpha! H_nu(alpha; kappa, n) R_alpha` and
/// `R_alpha = (kappa+1)_alpha/(lambda)_n sum_nu H_nu(alpha; kappa, n)/B_nu(kappa, n) P_nu`.
pub fn connection_check<S: Scalar>(
    n: usize,
    w: &SimplexWeight<S>,
    sample_points: &[SimplexPoint<S>],
) -> Result<IdentityReport> {
    let d = w.d();
    let p = w.hahn(n)?;
    let nus = enumerate_lattice(d, n);
    let alphas = enumerate_lattice(d + 1, n);
    let mut h = Vec::with_capacity(nus.len());
    for nu in &nus {
        let row = alphas.iter().map(|a| hahn_basis(nu, a, &p)).collect::<Result<Vec<S>>>()?;
        h.push(row);
    }
    let norms = nus.iter().map(|nu| hahn_norm(nu, &p)).collect::<Result<Vec<S>>>()?;
    let n_fact = pochhammer(&S::one(), n);
    let lambda_n = pochhammer(&w.lambda(), n);
    let kp1: Vec<S> = w.kappa.iter().map(|k| k.clone() + S::one()).collect();

    let per_point = sample_points
        .par_iter()
        .map(|x| -> Result<Vec<S>> {
            let pv = nus.iter().map(|nu| simplex_jacobi_eval(nu, x, w)).collect::<Result<Vec<S>>>()?;
            let rv = alphas.iter().map(|a| monic_simplex_eval(a, x, w)).collect::<Result<Vec<S>>>()?;
            let mut res = Vec::with_capacity(nus.len() + alphas.len());
            for (i, _) in nus.iter().enumerate() {
                let rhs = alphas.iter().enumerate().fold(S::zero(), |acc, (k, a)| {
                    acc + n_fact.clone() / a.factorial::<S>() * h[i][k].clone() * rv[k].clone()
                });
                res.push(pv[i].clone() - rhs);
            }
            for (k, a) in alphas.iter().enumerate() {
                let sum = nus
                    .iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (i, _)| acc + h[i][k].clone() / norms[i].clone() * pv[i].clone());
                let rhs = multi_pochhammer(&kp1, a.parts())? / lambda_n.clone() * sum;
                res.push(rv[k].clone() - rhs);
            }
            Ok(res)
        })
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<S> = per_point.into_iter().flatten().collect();
    Ok(IdentityReport::from_residuals(&residuals))
}

/// Which generating-function identity to check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratingFunction {
    /// `|y|^N P_nu(y'/|y|) = sum_{|alpha|=N} N!/alpha! H_nu(alpha; kappa, N) y^alpha`, `nu` of length `d`.
    Basis(MultiIndex),
    /// `|y|^N R_beta(y'/|y|) = (-1)^{|beta|}/(-N)_{|beta|} sum N!/alpha! Q_beta(alpha; kappa, N) y^alpha`.
    Monic(MultiIndex),
    /// `1/(-N)_{|alpha|} sum_{|gamma|=N} N!/gamma! (-gamma)_alpha y^gamma = |y|^{N-|alpha|} y^alpha`.
    MonomialLemma(MultiIndex),
}

/// Checks one generating-function identity at `y` of length `d+1`.
pub fn generating_function_check<S: Scalar>(
    kind: &GeneratingFunction,
    big_n: usize,
    y: &[S],
    w: &SimplexWeight<S>,
) -> Result<IdentityReport> {
    let d = w.d();
    if y.len() != d + 1 {
        return Err(Error::LengthMismatch {
            expected: d + 1,
            got: y.len(),
        });
    }
    let norm = y.iter().fold(S::zero(), |acc, v| acc + v.clone());
    if norm.is_zero() {
        return Err(Error::ZeroNorm);
    }
    let lattice = enumerate_lattice(d + 1, big_n);
    let n_fact = pochhammer(&S::one(), big_n);
    let multinomial = |a: &MultiIndex| n_fact.clone() / a.factorial::<S>() * power_monomial(a.parts(), y);
    let scaled = || SimplexPoint::new(y[..d].iter().map(|v| v.clone() / norm.clone()).collect());

    let residual = match kind {
        GeneratingFunction::Basis(nu) => {
            let p = w.hahn(big_n)?;
            let lhs = norm.powu(big_n) * simplex_jacobi_eval(nu, &scaled(), w)?;
            let terms = lattice
                .par_iter()
                .map(|a| Ok(multinomial(a) * hahn_basis(nu, a, &p)?))
                .collect::<Result<Vec<S>>>()?;
            lhs - terms.into_iter().fold(S::zero(), |acc, t| acc + t)
        }
        GeneratingFunction::Monic(beta) => {
            let p = w.hahn(big_n)?;
            let m = beta.degree();
            if m > big_n {
                return Err(Error::DegreeTooHigh {
                    degree: m,
                    max: big_n,
                });
            }
            let lhs = norm.powu(big_n) * monic_simplex_eval(beta, &scaled(), w)?;
            let terms = lattice
                .par_iter()
                .map(|a| Ok(multinomial(a) * monic_hahn(beta, a, &p)?))
                .collect::<Result<Vec<S>>>()?;
            let sum = terms.into_iter().fold(S::zero(), |acc, t| acc + t);
            let pre = crate::hahn_mv::sign::<S>(m) / crate::hahn_mv::neg_pochhammer::<S>(big_n, m);
            lhs - pre * sum
        }
        GeneratingFunction::MonomialLemma(alpha) => {
            if alpha.len() != d + 1 {
                return Err(Error::LengthMismatch {
                    expected: d + 1,
                    got: alpha.len(),
                });
            }
            let m = alpha.degree();
            if m > big_n {
                return Err(Error::DegreeTooHigh {
                    degree: m,
                    max: big_n,
                });
            }
            let sum = lattice.iter().try_fold(S::zero(), |acc, g| -> Result<S> {
                let neg_g: Vec<S> = g.parts().iter().map(|&v| -S::from_usize(v)).collect();
                Ok(acc + multinomial(g) * multi_pochhammer(&neg_g, alpha.parts())?)
            })?;
            let lhs = sum / crate::hahn_mv::neg_pochhammer::<S>(big_n, m);
            lhs - norm.powu(big_n - m) * power_monomial(alpha.parts(), y)
        }
    };
    Ok(IdentityReport::from_residuals(&[residual]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho1d::jacobi1_normalized;
    use crate::scalar::{parse_rational, Rational};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn weight(k: &[i64]) -> SimplexWeight<Rational> {
        SimplexWeight::new(k.iter().map(|&v| r(v)).collect()).unwrap()
    }

    fn random_points(d: usize, count: usize, seed: u64) -> Vec<SimplexPoint<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                SimplexPoint::new(
                    (0..d)
                        .map(|_| Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=7).into()))
                        .collect(),
                )
            })
            .collect()
    }

    /// Polynomials in the homogeneous variables `X_1..X_{d+1}`.
    type Poly = BTreeMap<Vec<usize>, Rational>;

    fn poly_mul(a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *out.entry(e).or_insert_with(|| r(0)) += ca * cb;
            }
        }
        out.retain(|_, c| *c != r(0));
        out
    }

    fn poly_const(len: usize, c: Rational) -> Poly {
        Poly::from([(vec![0; len], c)])
    }

    /// `s_j = X_j + ... + X_{d+1}`.
    fn chain_poly(len: usize, j: usize) -> Poly {
        (j - 1..len)
            .map(|i| {
                let mut e = vec![0; len];
                e[i] = 1;
                (e, r(1))
            })
            .collect()
    }

    fn poly_pow(p: &Poly, k: usize, len: usize) -> Poly {
        (0..k).fold(poly_const(len, r(1)), |acc, _| poly_mul(&acc, p))
    }

    /// `P_nu` expanded in `X`, built from the one-variable Jacobi coefficients.
    fn jacobi_poly(nu: &[usize], w: &SimplexWeight<Rational>) -> Poly {
        let len = nu.len() + 1;
        let mut acc = poly_const(len, r(1));
        for j in 1..len {
            let n = nu[j - 1];
            let c = jacobi_coefficients(n, &w.a_j(nu, j), &w.kappa[j - 1]).unwrap();
            let mut factor = Poly::new();
            for (k, ck) in c.iter().enumerate() {
                let term = poly_mul(
                    &poly_pow(&chain_poly(len, j + 1), k, len),
                    &poly_pow(&chain_poly(len, j), n - k, len),
                );
                for (e, v) in term {
                    *factor.entry(e).or_insert_with(|| r(0)) += ck * v;
                }
            }
            acc = poly_mul(&acc, &factor);
        }
        acc
    }

    /// Dirichlet moments `w_kappa int X^b W_kappa = (kappa+1)_b / (lambda)_{|b|}`.
    fn integrate(p: &Poly, w: &SimplexWeight<Rational>) -> Rational {
        let kp1: Vec<Rational> = w.kappa().iter().map(|k| k + r(1)).collect();
        p.iter()
            .map(|(e, c)| {
                let deg: usize = e.iter().sum();
                c * multi_pochhammer(&kp1, e).unwrap() / pochhammer(&w.lambda(), deg)
            })
            .sum()
    }

    #[test]
    fn trivial_values() {
        let w = weight(&[0, 1, 2]);
        let x = SimplexPoint::new(vec![q("2/7"), q("-1/3")]);
        assert_eq!(simplex_jacobi_eval(&MultiIndex::zeros(2), &x, &w).unwrap(), r(1));
        assert_eq!(monic_simplex_eval(&MultiIndex::zeros(3), &x, &w).unwrap(), r(1));
    }

    #[test]
    fn one_variable_reduces_to_jacobi() {
        let w = SimplexWeight::new(vec![q("1/2"), q("3/4")]).unwrap();
        for n in 0..5 {
            for x in ["0", "1/3", "5/4", "-2"] {
                let xv = q(x);
                let got = simplex_jacobi_eval(&MultiIndex::new(vec![n]), &SimplexPoint::new(vec![xv.clone()]), &w).unwrap();
                let t = r(2) * &xv - r(1);
                let expected = jacobi1_normalized(n, &t, &q("3/4"), &q("1/2")).unwrap();
                assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn first_monic_example() {
        let w = weight(&[0, 0, 0]);
        for x in random_points(2, 5, 3) {
            let got = monic_simplex_eval(&MultiIndex::new(vec![1, 0, 0]), &x, &w).unwrap();
            assert_eq!(got, &x.coords()[0] - q("1/3"));
        }
    }

    #[test]
    fn direct_form_agrees_off_the_chain_zeros() {
        let w = weight(&[1, 0, 2, 1]);
        for x in random_points(3, 10, 11) {
            for nu in enumerate_lattice(3, 3) {
                match simplex_jacobi_direct(&nu, &x, &w) {
                    Ok(v) => assert_eq!(v, simplex_jacobi_eval(&nu, &x, &w).unwrap()),
                    Err(e) => assert!(matches!(e, Error::ChainSingularity { .. })),
                }
            }
        }
    }

    #[test]
    fn chain_zero_is_removable() {
        let w = weight(&[0, 1, 1]);
        let x = SimplexPoint::new(vec![r(1), q("1/5")]);
        let nu = MultiIndex::new(vec![1, 2]);
        assert_eq!(
            simplex_jacobi_direct(&nu, &x, &w),
            Err(Error::ChainSingularity { position: 2 })
        );
        let v = simplex_jacobi_eval(&nu, &x, &w).unwrap();
        // Approach the singular point along x_1 -> 1.
        let near = |eps: f64| {
            let wf = SimplexWeight::new(vec![0.0, 1.0, 1.0]).unwrap();
            simplex_jacobi_direct(&nu, &SimplexPoint::new(vec![1.0 - eps, 0.2]), &wf).unwrap()
        };
        assert!((near(1e-7) - v.to_float()).abs() < 1e-5);
    }

    #[test]
    fn membership() {
        assert!(SimplexPoint::new(vec![q("1/2"), q("1/2")]).in_simplex());
        assert!(SimplexPoint::new(vec![r(0), r(0)]).in_simplex());
        assert!(!SimplexPoint::new(vec![q("2/3"), q("1/2")]).in_simplex());
        assert!(!SimplexPoint::new(vec![q("-1/9"), q("1/2")]).in_simplex());
    }

    #[test]
    fn normalization_constant() {
        let w = weight(&[1, 0, 2]);
        // Gamma(6) / (Gamma(2) Gamma(1) Gamma(3)) = 120 / 2.
        assert_eq!(w.normalization().to_rational(), Some(r(60)));
        let half = SimplexWeight::new(vec![q("1/2"), r(0)]).unwrap();
        assert_eq!(half.normalization().to_rational(), None);
    }

    #[test]
    fn polynomial_expansion_matches_evaluation() {
        let w = weight(&[1, 2, 0]);
        let pts = random_points(2, 4, 5);
        for nu in enumerate_lattice(2, 3) {
            let poly = jacobi_poly(nu.parts(), &w);
            for x in &pts {
                let big_x = x.homogeneous();
                let val: Rational = poly.iter().map(|(e, c)| c * power_monomial(e, &big_x)).sum();
                assert_eq!(val, simplex_jacobi_eval(&nu, x, &w).unwrap());
            }
        }
    }

    #[test]
    fn continuous_orthogonality_and_norms() {
        for kappa in [vec![0, 0, 0], vec![1, 0, 2], vec![0, 1, 0, 2]] {
            let w = weight(&kappa);
            let d = w.d();
            let all: Vec<MultiIndex> = (0..=3).flat_map(|n| enumerate_lattice(d, n)).collect();
            let polys: Vec<Poly> = all.iter().map(|nu| jacobi_poly(nu.parts(), &w)).collect();
            for (i, a) in all.iter().enumerate() {
                for (j, _) in all.iter().enumerate().take(i + 1) {
                    let ip = integrate(&poly_mul(&polys[i], &polys[j]), &w);
                    if i == j {
                        assert_eq!(ip, simplex_jacobi_norm(a, &w).unwrap(), "{a}");
                    } else {
                        assert_eq!(ip, r(0));
                    }
                }
            }
        }
    }

    #[test]
    fn connection_examples() {
        let w = weight(&[0, 0, 0]);
        let rep = connection_check(2, &w, &random_points(2, 10, 1)).unwrap();
        assert!(rep.exact_zero);
        assert_eq!(rep.checks, 10 * (3 + 6));
        let w = weight(&[1, 0, 2, 1]);
        assert!(connection_check(1, &w, &random_points(3, 5, 2)).unwrap().exact_zero);
        assert!(connection_check(0, &w, &random_points(3, 3, 2)).unwrap().exact_zero);
    }

    #[test]
    fn generating_examples() {
        let w = weight(&[0, 0, 0]);
        let y = vec![r(1), r(2), r(3)];
        let rep = generating_function_check(&GeneratingFunction::Basis(MultiIndex::new(vec![1, 1])), 3, &y, &w).unwrap();
        assert!(rep.exact_zero);
        let rep =
            generating_function_check(&GeneratingFunction::Basis(MultiIndex::zeros(2)), 1, &y, &w).unwrap();
        assert!(rep.exact_zero);
        for beta in enumerate_lattice(3, 2) {
            let rep = generating_function_check(&GeneratingFunction::Monic(beta), 3, &y, &w).unwrap();
            assert!(rep.exact_zero);
        }
        let rep = generating_function_check(&GeneratingFunction::MonomialLemma(MultiIndex::zeros(3)), 4, &y, &w)
            .unwrap();
        assert!(rep.exact_zero);
    }

    #[test]
    fn generating_rejects_zero_sum() {
        let w = weight(&[0, 0, 0]);
        let y = vec![r(1), r(-3), r(2)];
        assert_eq!(
            generating_function_check(&GeneratingFunction::Basis(MultiIndex::zeros(2)), 2, &y, &w),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn float_backend_agrees() {
        let wq = weight(&[1, 0, 2]);
        let wf = SimplexWeight::new(vec![1.0, 0.0, 2.0]).unwrap();
        for x in random_points(2, 3, 9) {
            let xf = SimplexPoint::new(x.coords().iter().map(|v| v.to_float()).collect());
            for nu in enumerate_lattice(2, 3) {
                let a = simplex_jacobi_eval(&nu, &x, &wq).unwrap().to_float();
                let b = simplex_jacobi_eval(&nu, &xf, &wf).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }

    proptest! {
        #[test]
        fn monic_leading_part(a0 in 0usize..3, a1 in 0usize..3, a2 in 0usize..3, k0 in 0i64..3, k2 in 0i64..3) {
            let w = weight(&[k0, 1, k2]);
            let alpha = MultiIndex::new(vec![a0, a1, a2]);
            let n = alpha.degree();
            // Along a line x(t) = p + t v the order-n difference of R_alpha - X^alpha vanishes.
            let p = [q("1/5"), q("-2/3")];
            let v = [q("3/7"), q("1/2")];
            let diff_of = |f: &dyn Fn(&SimplexPoint<Rational>) -> Rational| {
                let mut vals: Vec<Rational> = (0..=n)
                    .map(|t| {
                        let t = r(t as i64);
                        f(&SimplexPoint::new(vec![&p[0] + &t * &v[0], &p[1] + &t * &v[1]]))
                    })
                    .collect();
                for _ in 0..n {
                    vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
                }
                vals[0].clone()
            };
            let rest = diff_of(&|x| monic_simplex_eval(&alpha, x, &w).unwrap() - power_monomial(alpha.parts(), &x.homogeneous()));
            prop_assert_eq!(rest, r(0));
        }

        #[test]
        fn monomial_lemma_holds(a0 in 0usize..3, a1 in 0usize..3, a2 in 0usize..2, extra in 0usize..3,
                                y0 in -5i64..6, y1 in -5i64..6, y2 in 1i64..6) {
            let w = weight(&[0, 0, 0]);
            let alpha = MultiIndex::new(vec![a0, a1, a2]);
            let y = vec![r(y0), q(&format!("{y1}/3")), r(y2)];
            prop_assume!(y.iter().sum::<Rational>() != r(0));
            let rep = generating_function_check(&GeneratingFunction::MonomialLemma(alpha.clone()), alpha.degree() + extra, &y, &w).unwrap();
            prop_assert!(rep.exact_zero);
        }
    }
}

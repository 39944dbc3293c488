//! One-variable Hahn, Krawtchouk and normalized Jacobi polynomials, evaluated
//! as terminating hypergeometric sums by term recursion.

use crate::error::{Error, Result};
use crate::lattice::pochhammer;
use crate::scalar::Scalar;

/// Parameters of `Q_n(x; a, b, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hahn1Params<S> {
    pub a: S,
    pub b: S,
    pub big_n: usize,
    pub relaxed: bool,
}

impl<S: Scalar> Hahn1Params<S> {
    /// Checks `a, b > -1` unless `relaxed` is set.
    pub fn new(a: S, b: S, big_n: usize, relaxed: bool) -> Result<Self> {
        if !relaxed {
            for (name, v) in [("a", &a), ("b", &b)] {
                if !(v.clone() + S::one()).is_positive() {
                    return Err(Error::InvalidParams(format!("{name} must exceed -1, got {v:?}")));
                }
            }
        }
        Ok(Hahn1Params { a, b, big_n, relaxed })
    }
}

/// Sums `sum_k prod_i (num_i)_k / prod_i (den_i)_k * z^k` for `k = 0..=n`.
///
/// The sum stops once a numerator factor vanishes; a vanishing denominator
/// before that point is an error.
fn terminating_sum<S: Scalar>(n: usize, num: &[S], den: &[S], z: &S) -> Result<S> {
    let mut term = S::one();
    let mut total = S::one();
    for k in 0..n {
        let kk = S::from_usize(k);
        let mut numer = z.clone();
        for a in num {
            numer = numer * (a.clone() + kk.clone());
        }
        if numer.is_zero() {
            break;
        }
        let mut denom = S::from_usize(k + 1);
        for b in den {
            denom = denom * (b.clone() + kk.clone());
        }
        if denom.is_zero() {
            return Err(Error::ZeroDenominator { term: k + 1 });
        }
        term = term * numer / denom;
        total = total + term.clone();
    }
    Ok(total)
}

/// `Q_n(x; a, b, N) = 3F2(-n, n+a+b+1, -x; a+1, -N; 1)`.
pub fn hahn1<S: Scalar>(n: usize, x: &S, p: &Hahn1Params<S>) -> Result<S> {
    let big_n = S::from_usize(p.big_n);
    let num = [
        -S::from_usize(n),
        S::from_usize(n + 1) + p.a.clone() + p.b.clone(),
        -x.clone(),
    ];
    let den = [p.a.clone() + S::one(), -big_n];
    terminating_sum(n, &num, &den, &S::one())
}

/// `(-M)_n Q_n(x; a, b, M)` written without the `(-M)_k` denominator:
/// `sum_k (-n)_k (n+a+b+1)_k (-x)_k (-M+k)_{n-k} / ((a+1)_k k!)`.
///
/// Defined for every integer or real `M`, which the multivariate product
/// formulas need when the local size drops below the degree.
pub fn hahn1_scaled<S: Scalar>(n: usize, x: &S, a: &S, b: &S, local: &S) -> Result<S> {
    let shift = S::from_usize(n + 1) + a.clone() + b.clone();
    let mut total = S::zero();
    for k in 0..=n {
        let ks = S::from_usize(k);
        let top = pochhammer(&-S::from_usize(n), k)
            * pochhammer(&shift, k)
            * pochhammer(&-x.clone(), k)
            * pochhammer(&(ks - local.clone()), n - k);
        if top.is_zero() {
            continue;
        }
        let bottom = pochhammer(&(a.clone() + S::one()), k) * pochhammer(&S::one(), k);
        if bottom.is_zero() {
            return Err(Error::ZeroDenominator { term: k });
        }
        total = total + top / bottom;
    }
    Ok(total)
}

/// `K_n(x; p, N) = 2F1(-n, -x; -N; 1/p)`.
pub fn krawtchouk1<S: Scalar>(n: usize, x: &S, p: &S, big_n: usize) -> Result<S> {
    if p.is_zero() {
        return Err(Error::InvalidParams("Krawtchouk probability must be nonzero".into()));
    }
    let num = [-S::from_usize(n), -x.clone()];
    let den = [-S::from_usize(big_n)];
    terminating_sum(n, &num, &den, &(S::one() / p.clone()))
}

/// `(-M)_n K_n(x; p, M) = sum_k (-n)_k (-x)_k p^{-k} (-M+k)_{n-k} / k!`.
pub fn krawtchouk1_scaled<S: Scalar>(n: usize, x: &S, p: &S, local: &S) -> Result<S> {
    if p.is_zero() {
        return Err(Error::InvalidParams("Krawtchouk probability must be nonzero".into()));
    }
    let inv = S::one() / p.clone();
    let mut total = S::zero();
    for k in 0..=n {
        let ks = S::from_usize(k);
        let top = pochhammer(&-S::from_usize(n), k)
            * pochhammer(&-x.clone(), k)
            * inv.powu(k)
            * pochhammer(&(ks - local.clone()), n - k);
        total = total + top / pochhammer(&S::one(), k);
    }
    Ok(total)
}

/// `P_n^{(a,b)}(t) / P_n^{(a,b)}(1) = 2F1(-n, n+a+b+1; a+1; (1-t)/2)`.
pub fn jacobi1_normalized<S: Scalar>(n: usize, t: &S, a: &S, b: &S) -> Result<S> {
    let z = (S::one() - t.clone()) / S::from_int(2);
    let num = [
        -S::from_usize(n),
        S::from_usize(n + 1) + a.clone() + b.clone(),
    ];
    let den = [a.clone() + S::one()];
    terminating_sum(n, &num, &den, &z)
}

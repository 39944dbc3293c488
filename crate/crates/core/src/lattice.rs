//! Multi-indices, the homogeneous lattice `Z_N^{d+1}`, Pochhammer symbols and
//! the falling-factorial monomials `m_a(x)`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A vector of nonnegative integers such as `alpha`, `gamma`, `nu` or a lattice
/// point `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(parts: Vec<usize>) -> Self {
        MultiIndex(parts)
    }

    pub fn zeros(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|a| = a_1 + ... + a_len`.
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The first `len - 1` coordinates, i.e. `x` for a homogeneous point `(x, N - |x|)`.
    pub fn head(&self) -> MultiIndex {
        MultiIndex(self.0[..self.0.len().saturating_sub(1)].to_vec())
    }

    /// Appends `total - |self|` so the result has degree `total`.
    pub fn homogenize(&self, total: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.push(total - self.degree());
        MultiIndex(v)
    }

    pub fn to_scalars<S: Scalar>(&self) -> Vec<S> {
        self.0.iter().map(|&v| S::from_usize(v)).collect()
    }

    /// `a! = a_1! ... a_len!` as a scalar.
    pub fn factorial<S: Scalar>(&self) -> S {
        self.0
            .iter()
            .fold(S::one(), |acc, &v| acc * pochhammer(&S::one(), v))
    }

    /// All `g` with `0 <= g <= self` componentwise, in reverse-lexicographic order.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.len())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=bound).rev().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(v: &[usize]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All compositions of `total` into `ambient_len` nonnegative parts, largest
/// first coordinate first.
pub fn enumerate_lattice(ambient_len: usize, total: usize) -> Vec<MultiIndex> {
    fn rec(len: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if len == 1 {
            prefix.push(total);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=total).rev() {
            prefix.push(a);
            rec(len - 1, total - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if ambient_len == 0 {
        return out;
    }
    rec(ambient_len, total, &mut Vec::with_capacity(ambient_len), &mut out);
    out
}

/// `Z_N^{d+1}` with an index lookup for its points.
#[derive(Debug, Clone)]
pub struct HomogeneousLattice {
    ambient_len: usize,
    degree: usize,
    points: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl HomogeneousLattice {
    pub fn new(ambient_len: usize, degree: usize) -> Result<Self> {
        if ambient_len == 0 {
            return Err(Error::InvalidParams("lattice needs at least one coordinate".into()));
        }
        let points = enumerate_lattice(ambient_len, degree);
        let position = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(HomogeneousLattice {
            ambient_len,
            degree,
            points,
            position,
        })
    }

    pub fn ambient_len(&self) -> usize {
        self.ambient_len
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[MultiIndex] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, x: &MultiIndex) -> Option<usize> {
        self.position.get(x).copied()
    }
}

/// `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer<S: Scalar>(a: &S, k: usize) -> S {
    let mut acc = S::one();
    let mut t = a.clone();
    for _ in 0..k {
        acc = acc * t.clone();
        t = t + S::one();
    }
    acc
}

/// `(v)_a = prod_i (v_i)_{a_i}`.
pub fn multi_pochhammer<S: Scalar>(v: &[S], alpha: &[usize]) -> Result<S> {
    if v.len() != alpha.len() {
        return Err(Error::LengthMismatch {
            expected: alpha.len(),
            got: v.len(),
        });
    }
    Ok(v.iter()
        .zip(alpha)
        .fold(S::one(), |acc, (vi, &ai)| acc * pochhammer(vi, ai)))
}

/// `m_a(x) = (-1)^{|a|} (-x)_a = prod_i x_i (x_i - 1) ... (x_i - a_i + 1)`.
pub fn monic_monomial<S: Scalar>(alpha: &[usize], x: &[S]) -> Result<S> {
    if alpha.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: alpha.len(),
            got: x.len(),
        });
    }
    let mut acc = S::one();
    for (&a, xi) in alpha.iter().zip(x) {
        for j in 0..a {
            acc = acc * (xi.clone() - S::from_usize(j));
        }
    }
    Ok(acc)
}

/// Ordinary power `x^g`.
pub fn power_monomial<S: Scalar>(gamma: &[usize], x: &[S]) -> S {
    gamma
        .iter()
        .zip(x)
        .fold(S::one(), |acc, (&g, xi)| acc * xi.powu(g))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `(r(d,n), n(d,n)) = (C(n+d-1, n), C(n+d, d))`: the dimension of the
/// degree-`n` orthogonal space in `d` variables and of all polynomials of
/// degree at most `n`.
pub fn dims(d: usize, n: usize) -> (BigUint, BigUint) {
    (binomial(n + d - 1, n), binomial(n + d, d))
}

/// `r(d,n)` as a machine integer, for sizing tables.
pub fn r_dim(d: usize, n: usize) -> usize {
    enumerate_count(d, n)
}

/// `n(d,n)` as a machine integer.
pub fn n_dim(d: usize, n: usize) -> usize {
    enumerate_count(d + 1, n)
}

fn enumerate_count(len: usize, total: usize) -> usize {
    if len == 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..(len - 1) {
        acc = acc * (total + 1 + i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// `(|x_j|, |x^j|)` with 1-based `j`: the sum of the first `j` parts and of
/// the parts from position `j` on. Out-of-range ends give the empty sum.
pub fn partial_sums(x: &[usize], j: usize) -> (usize, usize) {
    let head = x[..j.min(x.len())].iter().sum();
    let tail = if j == 0 {
        x.iter().sum()
    } else if j > x.len() {
        0
    } else {
        x[j - 1..].iter().sum()
    };
    (head, tail)
}

//! Euclidean tight frames built from the Hahn and Krawtchouk polynomials,
//! with exact verification of Parseval's identity and of the Gram matrices.
//!
//! Exact frames hold [`Surd`] entries. Products of entries are accumulated
//! in a [`RadicalSum`], grouped by square-free radicand, with an exact zero
//! test.

use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hahn_mv::{
    c_constant, d_constant, hahn_basis, hahn_basis_at, hahn_norm, monic_projection, monic_projection_at, HahnParams,
};
use crate::krawtchouk_mv::{kraw_basis, kraw_kernel_constant, kraw_norm, monic_kraw_projection_at, KrawParams};
use crate::lattice::{enumerate_lattice, multi_pochhammer, n_dim, pochhammer, MultiIndex};
use crate::scalar::{parse_rational, Mode, RadicalSum, Rational, Scalar, Surd, ToleranceProfile, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameFamily {
    HahnH,
    KrawK,
    XiRational,
    CombinedHahn,
    External,
}

/// Parameters as text: `"p/q"` strings for exact frames, floats otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrameParams {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_list: Vec<usize>,
}

/// A frame stored column-wise: column `j` is one frame vector, row `i` one
/// coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMatrix {
    pub family: FrameFamily,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "m_or_N")]
    pub m_or_n: usize,
    pub params: FrameParams,
    pub row_index: Vec<String>,
    pub col_index: Vec<String>,
    pub entries: Vec<Vec<Value>>,
}

impl FrameMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.col_index.len()
    }

    pub fn column(&self, j: usize) -> Vec<Value> {
        self.entries.iter().map(|row| row[j].clone()).collect()
    }

    /// `true` for all-surd frames, `false` for all-float frames.
    pub fn is_exact(&self) -> Result<bool> {
        let mut kinds = self.entries.iter().flatten().map(Value::is_exact);
        let first = kinds.next().unwrap_or(true);
        if kinds.any(|k| k != first) {
            return Err(Error::MixedExactness);
        }
        Ok(first)
    }

    /// Checks that labels and entries agree in shape.
    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.row_index.len() {
            return Err(Error::LengthMismatch {
                expected: self.row_index.len(),
                got: self.entries.len(),
            });
        }
        for row in &self.entries {
            if row.len() != self.col_index.len() {
                return Err(Error::LengthMismatch {
                    expected: self.col_index.len(),
                    got: row.len(),
                });
            }
        }
        self.is_exact().map(|_| ())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: FrameMatrix = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("frame serializes")
    }

    /// Same frame with column `j` negated.
    pub fn with_negated_column(&self, j: usize) -> Self {
        let mut out = self.clone();
        for row in &mut out.entries {
            row[j] = row[j].negated();
        }
        out
    }

    /// Same frame without column `j`.
    pub fn without_column(&self, j: usize) -> Self {
        let mut out = self.clone();
        out.col_index.remove(j);
        for row in &mut out.entries {
            row.remove(j);
        }
        out
    }

    /// Float copy of the entries.
    pub fn to_floats(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(Value::to_f64).collect())
            .collect()
    }
}

/// Result of the tightness and Gram checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameReport {
    pub exact: bool,
    /// `S = F F^T` equals the identity (exactly, or within tolerance).
    pub tight: bool,
    /// `max |S_ij - delta_ij|`.
    pub tight_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_kernel_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_kernel_residual: Option<f64>,
    /// Squared column norms.
    pub norms: Vec<Value>,
    pub is_normalized: bool,
    pub element_count: usize,
}

fn root_entry<S: Scalar>(value: &S, weight: &S) -> Result<Value> {
    S::root_scaled(value, weight).map_err(|e| match e {
        Error::NegativeRadicand(v) => Error::InvalidParams(format!("frame entry needs the square root of {v}")),
        other => other,
    })
}

fn check_degrees(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("frame degree n must be at least 1".into()));
    }
    if n > m {
        return Err(Error::DegreeOrderViolation { n, m, big_n: m });
    }
    Ok(())
}

fn check_param_len<S>(v: &[S], d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: v.len(),
        });
    }
    Ok(())
}

/// Assembles columns computed independently into a row-major matrix.
fn from_columns(columns: Vec<Vec<Value>>, rows: usize) -> Vec<Vec<Value>> {
    (0..rows)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// `w_alpha = m! (kappa+1)_alpha / ((lambda)_m alpha!)`.
fn hahn_column_weight<S: Scalar>(alpha: &MultiIndex, p: &HahnParams<S>) -> Result<S> {
    let m = alpha.degree();
    let den = pochhammer(&p.lambda(), m) * alpha.factorial::<S>();
    if den.is_zero() {
        return Err(Error::ZeroDenominator { term: m });
    }
    Ok(pochhammer(&S::one(), m) * multi_pochhammer(&p.kappa_plus_one(), alpha.parts())? / den)
}

/// `w_alpha = m! bold_rho^alpha / alpha!`.
fn kraw_column_weight<S: Scalar>(alpha: &MultiIndex, p: &KrawParams<S>) -> S {
    let m = alpha.degree();
    let rho_pow = p
        .bold_rho()
        .iter()
        .zip(alpha.parts())
        .fold(S::one(), |acc, (r, &e)| acc * r.powu(e));
    pochhammer(&S::one(), m) * rho_pow / alpha.factorial::<S>()
}

/// The frame `H(d, n, m, kappa)` of `C(m+d, d)` vectors in `R^{r(d,n)}`:
/// `h_alpha = sqrt(w_alpha) (H_nu(alpha; kappa, m) / sqrt(B_nu(kappa, m)))_nu`.
///
/// `kappa` is not required to satisfy `kappa_i > -1`; parameters for which
/// some entry needs the square root of a negative number are rejected.
pub fn build_hahn_frame<S: Scalar>(d: usize, n: usize, m: usize, kappa: &[S]) -> Result<FrameMatrix> {
    check_param_len(kappa, d + 1)?;
    check_degrees(n, m)?;
    let p = HahnParams::relaxed(kappa.to_vec(), m)?;
    let nus = enumerate_lattice(d, n);
    let norms = nus.iter().map(|nu| hahn_norm(nu, &p)).collect::<Result<Vec<S>>>()?;
    let alphas = enumerate_lattice(d + 1, m);
    let columns = alphas
        .par_iter()
        .map(|alpha| {
            let w = hahn_column_weight(alpha, &p)?;
            nus.iter()
                .zip(&norms)
                .map(|(nu, b)| {
                    if b.is_zero() {
                        return Err(Error::ZeroDenominator { term: nu.degree() });
                    }
                    root_entry(&hahn_basis(nu, alpha, &p)?, &(w.clone() / b.clone()))
                })
                .collect::<Result<Vec<Value>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameMatrix {
        family: FrameFamily::HahnH,
        d,
        n,
        m_or_n: m,
        params: FrameParams {
            kappa: kappa.iter().map(Scalar::label).collect(),
            ..Default::default()
        },
        row_index: nus.iter().map(ToString::to_string).collect(),
        col_index: alphas.iter().map(ToString::to_string).collect(),
        entries: from_columns(columns, nus.len()),
    })
}

/// The frame `K(d, n, m, rho)`:
/// `k_alpha = sqrt(m! bold_rho^alpha / alpha!) (K_nu(alpha; rho, m) / sqrt(C_nu(rho, m)))_nu`.
pub fn build_kraw_frame<S: Scalar>(d: usize, n: usize, m: usize, rho: &[S]) -> Result<FrameMatrix> {
    check_param_len(rho, d)?;
    check_degrees(n, m)?;
    let p = KrawParams::new(rho.to_vec(), m)?;
    let nus = enumerate_lattice(d, n);
    let norms = nus.iter().map(|nu| kraw_norm(nu, &p)).collect::<Result<Vec<S>>>()?;
    let alphas = enumerate_lattice(d + 1, m);
    let columns = alphas
        .par_iter()
        .map(|alpha| {
            let w = kraw_column_weight(alpha, &p);
            nus.iter()
                .zip(&norms)
                .map(|(nu, c)| root_entry(&kraw_basis(nu, alpha, &p)?, &(w.clone() / c.clone())))
                .collect::<Result<Vec<Value>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameMatrix {
        family: FrameFamily::KrawK,
        d,
        n,
        m_or_n: m,
        params: FrameParams {
            rho: rho.iter().map(Scalar::label).collect(),
            ..Default::default()
        },
        row_index: nus.iter().map(ToString::to_string).collect(),
        col_index: alphas.iter().map(ToString::to_string).collect(),
        entries: from_columns(columns, nus.len()),
    })
}

fn degree_label(n: usize, alpha: &MultiIndex) -> String {
    format!("n={n}:{alpha}")
}

/// The frame `Xi(d, N)` of `1 + N n(d,N)` vectors in `R^{n(d,N)}`: the
/// constant `q_0 = sqrt(N!/(d+1)_N) 1` and `q_{alpha,n} = (Q_{alpha,n}(beta; 0, N))_beta`
/// for `n = 1..=N` and `|alpha| = N`, rows indexed by `beta`.
pub fn build_xi_frame<S: Scalar>(d: usize, big_n: usize) -> Result<FrameMatrix> {
    if d == 0 || big_n == 0 {
        return Err(Error::InvalidParams("Xi(d, N) needs d >= 1 and N >= 1".into()));
    }
    let p = HahnParams::<S>::zero(d, big_n);
    let points = enumerate_lattice(d + 1, big_n);
    let c = pochhammer(&S::one(), big_n) / pochhammer(&S::from_usize(d + 1), big_n);
    let q0 = root_entry(&S::one(), &c)?;
    let mut labels = vec!["q0".to_string()];
    let mut columns = vec![vec![q0; points.len()]];
    let keys: Vec<(usize, MultiIndex)> = (1..=big_n)
        .flat_map(|n| points.iter().map(move |a| (n, a.clone())))
        .collect();
    let rest = keys
        .par_iter()
        .map(|(n, alpha)| {
            points
                .iter()
                .map(|beta| root_entry(&monic_projection(alpha, *n, beta, &p)?, &S::one()))
                .collect::<Result<Vec<Value>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    labels.extend(keys.iter().map(|(n, a)| degree_label(*n, a)));
    columns.extend(rest);
    Ok(FrameMatrix {
        family: FrameFamily::XiRational,
        d,
        n: big_n,
        m_or_n: big_n,
        params: FrameParams::default(),
        row_index: points.iter().map(ToString::to_string).collect(),
        col_index: labels,
        entries: from_columns(columns, points.len()),
    })
}

/// The frame `{1} U Xi_{m_1,1} U ... U Xi_{m_N,N}` for polynomials of degree
/// at most `N`, written in the coordinates of the orthonormal basis
/// `H_nu / sqrt(B_nu(kappa, N))`, `|nu| <= N`.
///
/// The column of `(alpha, n)` is supported on `|nu| = n` with entries
/// `sqrt(D_n (kappa+1)_alpha / (alpha! B_nu)) C_n H_nu(alpha; kappa, m_n)`.
pub fn build_combined_hahn_frame<S: Scalar>(
    d: usize,
    big_n: usize,
    m_list: &[usize],
    kappa: &[S],
) -> Result<FrameMatrix> {
    check_param_len(kappa, d + 1)?;
    check_param_len(m_list, big_n)?;
    for (i, &m) in m_list.iter().enumerate() {
        let n = i + 1;
        if m < n || m > big_n {
            return Err(Error::DegreeOrderViolation { n, m, big_n });
        }
    }
    let p = HahnParams::new(kappa.to_vec(), big_n)?;
    let nus: Vec<MultiIndex> = (0..=big_n).flat_map(|k| enumerate_lattice(d, k)).collect();
    let norms = nus.iter().map(|nu| hahn_norm(nu, &p)).collect::<Result<Vec<S>>>()?;
    let one: Vec<Value> = nus
        .iter()
        .map(|nu| root_entry(&S::from_usize(usize::from(nu.degree() == 0)), &S::one()))
        .collect::<Result<_>>()?;
    let keys: Vec<(usize, MultiIndex)> = m_list
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| enumerate_lattice(d + 1, m).into_iter().map(move |a| (i + 1, a)))
        .collect();
    let columns = keys
        .par_iter()
        .map(|(n, alpha)| {
            let m = alpha.degree();
            let pm = p.with_size(m);
            let cn = c_constant(*n, m, &p)?;
            let w = d_constant(*n, m, &p)? * multi_pochhammer(&p.kappa_plus_one(), alpha.parts())?
                / alpha.factorial::<S>();
            nus.iter()
                .zip(&norms)
                .map(|(nu, b)| {
                    if nu.degree() != *n {
                        return root_entry(&S::zero(), &S::one());
                    }
                    root_entry(&(cn.clone() * hahn_basis(nu, alpha, &pm)?), &(w.clone() / b.clone()))
                })
                .collect::<Result<Vec<Value>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all = vec![one];
    all.extend(columns);
    let mut labels = vec!["1".to_string()];
    labels.extend(keys.iter().map(|(n, a)| degree_label(*n, a)));
    Ok(FrameMatrix {
        family: FrameFamily::CombinedHahn,
        d,
        n: big_n,
        m_or_n: big_n,
        params: FrameParams {
            kappa: kappa.iter().map(Scalar::label).collect(),
            m_list: m_list.to_vec(),
            ..Default::default()
        },
        row_index: nus.iter().map(ToString::to_string).collect(),
        col_index: labels,
        entries: from_columns(all, nus.len()),
    })
}

/// Checks `T V = Xi(d, N)` exactly, where `V` is the combined frame with
/// `kappa = 0` and `m_n = N`, and `T` maps orthonormal `H_nu` coordinates to
/// lattice values scaled by `sqrt(N!/(d+1)_N)`.
pub fn xi_conjugation_check(d: usize, big_n: usize) -> Result<bool> {
    let kappa = vec![Rational::from_int(0); d + 1];
    let v = build_combined_hahn_frame(d, big_n, &vec![big_n; big_n], &kappa)?;
    let xi = build_xi_frame::<Rational>(d, big_n)?;
    let p = HahnParams::<Rational>::zero(d, big_n);
    let c = pochhammer(&Rational::from_int(1), big_n) / pochhammer(&Rational::from_usize(d + 1), big_n);
    let nus: Vec<MultiIndex> = (0..=big_n).flat_map(|k| enumerate_lattice(d, k)).collect();
    let points = enumerate_lattice(d + 1, big_n);
    let t = points
        .iter()
        .map(|beta| {
            nus.iter()
                .map(|nu| exact(&root_entry(&hahn_basis(nu, beta, &p)?, &(c.clone() / hahn_norm(nu, &p)?))?))
                .collect::<Result<Vec<Surd>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let vm = exact_matrix(&v)?;
    let xm = exact_matrix(&xi)?;
    if v.cols() != xi.cols() {
        return Ok(false);
    }
    let ok = (0..points.len()).into_par_iter().all(|i| {
        (0..xi.cols()).all(|j| {
            let mut acc = RadicalSum::new();
            for (k, tik) in t[i].iter().enumerate() {
                acc.add_product(tik, &vm[k][j]);
            }
            acc.add_surd(&-xm[i][j].clone());
            acc.is_zero()
        })
    });
    Ok(ok)
}

fn exact(v: &Value) -> Result<Surd> {
    match v {
        Value::Exact(s) => Ok(s.clone()),
        Value::Float(_) => Err(Error::MixedExactness),
    }
}

fn exact_matrix(f: &FrameMatrix) -> Result<Vec<Vec<Surd>>> {
    f.entries.iter().map(|row| row.iter().map(exact).collect()).collect()
}

/// Squared column norms, exact when the frame is.
fn column_norms(f: &FrameMatrix, exact_mode: bool) -> Vec<Value> {
    (0..f.cols())
        .map(|j| {
            if exact_mode {
                let total = f.entries.iter().fold(Rational::from_int(0), |acc, row| match &row[j] {
                    Value::Exact(s) => acc + s.square(),
                    Value::Float(_) => acc,
                });
                Value::Exact(Surd::from_rational(total))
            } else {
                Value::Float(f.entries.iter().map(|row| row[j].to_f64().powi(2)).sum())
            }
        })
        .collect()
}

fn all_equal(norms: &[Value], profile: &ToleranceProfile, exact_mode: bool) -> bool {
    let Some(first) = norms.first() else {
        return true;
    };
    norms.iter().all(|v| {
        if exact_mode {
            v == first
        } else {
            profile.float_eq(v.to_f64(), first.to_f64())
        }
    })
}

/// Computes the frame operator `S = sum_k v_k v_k^T` and decides `S = I`.
///
/// Exact frames are decided exactly; the tolerance in `profile` only applies
/// to float frames.
pub fn frame_operator_residual(f: &FrameMatrix, profile: &ToleranceProfile) -> Result<FrameReport> {
    f.validate()?;
    let exact_mode = f.is_exact()?;
    let rows = f.rows();
    let pairs: Vec<(usize, usize)> = (0..rows).flat_map(|i| (i..rows).map(move |j| (i, j))).collect();
    let (tight, residual) = if exact_mode {
        let m = exact_matrix(f)?;
        let results: Vec<(bool, f64)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut acc = RadicalSum::new();
                for (a, b) in m[i].iter().zip(&m[j]) {
                    acc.add_product(a, b);
                }
                if i == j {
                    acc.add_rational(&-Rational::from_int(1));
                }
                (acc.is_zero(), acc.to_f64().abs())
            })
            .collect();
        (
            results.iter().all(|r| r.0),
            results.iter().map(|r| r.1).fold(0.0, f64::max),
        )
    } else {
        let m = f.to_floats();
        let residual = pairs
            .par_iter()
            .map(|&(i, j)| {
                let s: f64 = m[i].iter().zip(&m[j]).map(|(a, b)| a * b).sum();
                (s - if i == j { 1.0 } else { 0.0 }).abs()
            })
            .reduce(|| 0.0, f64::max);
        (residual <= profile.abs_tol, residual)
    };
    let norms = column_norms(f, exact_mode);
    let is_normalized = all_equal(&norms, profile, exact_mode);
    Ok(FrameReport {
        exact: exact_mode,
        tight,
        tight_residual: residual,
        gram_kernel_ok: None,
        gram_kernel_residual: None,
        norms,
        is_normalized,
        element_count: f.cols(),
    })
}

/// Wraps a plain matrix (columns are frame vectors) and checks it.
pub fn verify_external_frame(entries: Vec<Vec<Value>>, profile: &ToleranceProfile) -> Result<FrameReport> {
    let rows = entries.len();
    let cols = entries.first().map_or(0, Vec::len);
    let f = FrameMatrix {
        family: FrameFamily::External,
        d: 0,
        n: 0,
        m_or_n: 0,
        params: FrameParams::default(),
        row_index: (0..rows).map(|i| format!("x{}", i + 1)).collect(),
        col_index: (0..cols).map(|j| format!("v{}", j + 1)).collect(),
        entries,
    };
    frame_operator_residual(&f, profile)
}

/// Parses `"(1,0,2)"` or `"n=1:(1,0,2)"` into an optional degree tag and index.
fn parse_label(label: &str) -> Result<(Option<usize>, MultiIndex)> {
    let (degree, body) = match label.split_once(':') {
        Some((tag, rest)) => {
            let n = tag
                .strip_prefix("n=")
                .and_then(|v| usize::from_str(v).ok())
                .ok_or_else(|| Error::Parse(format!("bad column label '{label}'")))?;
            (Some(n), rest)
        }
        None => (None, label),
    };
    let inner = body
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("bad index label '{label}'")))?;
    let parts = inner
        .split(',')
        .map(|v| usize::from_str(v.trim()).map_err(|e| Error::Parse(format!("'{label}': {e}"))))
        .collect::<Result<Vec<usize>>>()?;
    Ok((degree, MultiIndex::new(parts)))
}

fn parse_params<S: Scalar>(values: &[String], exact_mode: bool) -> Result<Vec<S>> {
    values
        .iter()
        .map(|v| {
            if exact_mode {
                Ok(S::from_rational(&parse_rational(v)?))
            } else {
                let x = f64::from_str(v.trim()).map_err(|e| Error::Parse(format!("'{v}': {e}")))?;
                Ok(S::from_rational(&Rational::from_float(x).ok_or_else(|| Error::Parse(v.clone()))?))
            }
        })
        .collect()
}

/// A kernel written as `K(j, k) = scale * sum_t c_t u_t[j] u_t[k]` over the
/// frame columns, each column carrying a weight `w_j`; the Gram entry of
/// columns `j, k` is expected to be `K(j, k) sqrt(w_j w_k)`.
struct KernelFactors<S> {
    terms: Vec<(S, Vec<S>)>,
    scale: S,
    weights: Vec<S>,
}

impl<S: Scalar> KernelFactors<S> {
    fn value(&self, j: usize, k: usize) -> S {
        let sum = self
            .terms
            .iter()
            .fold(S::zero(), |acc, (c, u)| acc + c.clone() * u[j].clone() * u[k].clone());
        sum * self.scale.clone()
    }
}

/// Compares every pairwise column inner product with the reproducing kernel:
///
/// * `HahnH`: `(h_alpha, h_beta) = sqrt(w_alpha w_beta) P_n(H_{kappa,m}; alpha, beta)`,
///   the kernel evaluated through the monic projections;
/// * `KrawK`: the same with `w_alpha = m! bold_rho^alpha / alpha!`;
/// * `XiRational`: `(q_{alpha,n}, q_{beta,n}) = P_n(H_{0,N}; alpha, beta) / n(d,N)`,
///   the kernel evaluated through the product basis, and zero across degrees.
pub fn gram_vs_kernel_check(f: &FrameMatrix, profile: &ToleranceProfile) -> Result<FrameReport> {
    let mut report = frame_operator_residual(f, profile)?;
    let (ok, residual) = if report.exact {
        gram_compare::<Rational>(f, profile, true)?
    } else {
        gram_compare::<f64>(f, profile, false)?
    };
    report.gram_kernel_ok = Some(ok);
    report.gram_kernel_residual = Some(residual);
    Ok(report)
}

fn kernel_factors<S: Scalar>(f: &FrameMatrix, exact_mode: bool) -> Result<KernelFactors<S>> {
    let labels: Vec<(Option<usize>, MultiIndex)> = match f.family {
        FrameFamily::XiRational => f
            .col_index
            .iter()
            .map(|l| if l == "q0" { Ok((Some(0), MultiIndex::new(vec![]))) } else { parse_label(l) })
            .collect::<Result<_>>()?,
        FrameFamily::HahnH | FrameFamily::KrawK => f.col_index.iter().map(|l| parse_label(l)).collect::<Result<_>>()?,
        other => return Err(Error::UnsupportedFamily(format!("{other:?}"))),
    };
    let (n, m) = (f.n, f.m_or_n);
    let points: Vec<Vec<S>> = labels.iter().map(|(_, a)| a.to_scalars::<S>()).collect();
    match f.family {
        FrameFamily::HahnH => {
            let kappa = parse_params::<S>(&f.params.kappa, exact_mode)?;
            let p = HahnParams::relaxed(kappa, m)?;
            let weights = labels
                .iter()
                .map(|(_, a)| hahn_column_weight(a, &p))
                .collect::<Result<Vec<S>>>()?;
            let terms = enumerate_lattice(f.d + 1, m)
                .par_iter()
                .map(|a| {
                    let c = multi_pochhammer(&p.kappa_plus_one(), a.parts())? / a.factorial::<S>();
                    let u = points
                        .iter()
                        .map(|x| monic_projection_at(a, n, x, &p))
                        .collect::<Result<Vec<S>>>()?;
                    Ok((c, u))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(KernelFactors {
                terms,
                scale: d_constant(n, m, &p)?,
                weights,
            })
        }
        FrameFamily::KrawK => {
            let rho = parse_params::<S>(&f.params.rho, exact_mode)?;
            let p = KrawParams::new(rho, m)?;
            let weights: Vec<S> = labels.iter().map(|(_, a)| kraw_column_weight(a, &p)).collect();
            let terms = enumerate_lattice(f.d + 1, m)
                .par_iter()
                .map(|a| {
                    let u = points
                        .iter()
                        .map(|x| monic_kraw_projection_at(a, n, x, &p))
                        .collect::<Result<Vec<S>>>()?;
                    Ok((kraw_column_weight(a, &p) / pochhammer(&S::one(), m), u))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(KernelFactors {
                terms,
                scale: kraw_kernel_constant(n, m, &p)?,
                weights,
            })
        }
        _ => {
            let p = HahnParams::<S>::zero(f.d, m);
            let nus: Vec<MultiIndex> = (1..=m).flat_map(|k| enumerate_lattice(f.d, k)).collect();
            let terms = nus
                .par_iter()
                .map(|nu| {
                    let u = labels
                        .iter()
                        .zip(&points)
                        .map(|((deg, _), x)| {
                            if *deg == Some(nu.degree()) {
                                hahn_basis_at(nu, x, &p)
                            } else {
                                Ok(S::zero())
                            }
                        })
                        .collect::<Result<Vec<S>>>()?;
                    Ok((S::one() / hahn_norm(nu, &p)?, u))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(KernelFactors {
                terms,
                scale: S::one() / S::from_usize(n_dim(f.d, m)),
                weights: vec![S::one(); labels.len()],
            })
        }
    }
}

fn gram_compare<S: Scalar>(f: &FrameMatrix, profile: &ToleranceProfile, exact_mode: bool) -> Result<(bool, f64)> {
    let kernel = kernel_factors::<S>(f, exact_mode)?;
    let cols = f.cols();
    let pairs: Vec<(usize, usize)> = (0..cols)
        .flat_map(|j| (j..cols).map(move |k| (j, k)))
        .filter(|&(j, k)| !(f.family == FrameFamily::XiRational && j == 0 && k == 0))
        .collect();
    let results = pairs
        .par_iter()
        .map(|&(j, k)| -> Result<(bool, f64)> {
            let weight = kernel.weights[j].clone() * kernel.weights[k].clone();
            let expected = S::root_scaled(&kernel.value(j, k), &weight)?;
            if exact_mode {
                let mut acc = RadicalSum::new();
                for row in &f.entries {
                    acc.add_product(&exact(&row[j])?, &exact(&row[k])?);
                }
                acc.add_surd(&-exact(&expected)?);
                Ok((acc.is_zero(), acc.to_f64().abs()))
            } else {
                let got: f64 = f.entries.iter().map(|row| row[j].to_f64() * row[k].to_f64()).sum();
                let diff = (got - expected.to_f64()).abs();
                Ok((profile.float_eq(got, expected.to_f64()), diff))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        results.iter().all(|r| r.0),
        results.iter().map(|r| r.1).fold(0.0, f64::max),
    ))
}

/// Checks `(v, v) = sum_k (v, col_k)^2` exactly for a rational vector `v`,
/// squaring each inner product as a [`RadicalSum`].
pub fn parseval_identity(f: &FrameMatrix, v: &[Rational]) -> Result<bool> {
    if v.len() != f.rows() {
        return Err(Error::LengthMismatch {
            expected: f.rows(),
            got: v.len(),
        });
    }
    let m = exact_matrix(f)?;
    let squares: Vec<RadicalSum> = (0..f.cols())
        .into_par_iter()
        .map(|k| {
            let mut ip = RadicalSum::new();
            for (vi, row) in v.iter().zip(&m) {
                ip.add_surd(&row[k].scale(vi));
            }
            ip.mul(&ip)
        })
        .collect();
    let mut total = RadicalSum::new();
    for sq in &squares {
        for t in sq.terms() {
            total.add_surd(&t);
        }
    }
    let norm: Rational = v.iter().map(|x| x * x).sum();
    Ok(total.equals_rational(&norm))
}

/// One column of a printed matrix that has no counterpart in the built frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnMismatch {
    /// Column of the printed matrix.
    pub printed_col: usize,
    /// Nearest built column, compared up to sign.
    pub built_col: usize,
    /// `(printed row, printed value, built value)` where they differ.
    pub entries: Vec<(usize, f64, f64)>,
}

/// Outcome of comparing a built frame with a printed one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureMatch {
    pub matched: bool,
    /// Printed row `i` corresponds to built row `row_perm[i]`.
    pub row_perm: Vec<usize>,
    /// Printed column `j` corresponds to built column `col_perm[j]`, if any.
    pub col_perm: Vec<Option<usize>>,
    /// Sign applied to the built column to reproduce the printed one.
    pub col_signs: Vec<i8>,
    pub mismatches: Vec<ColumnMismatch>,
}

fn values_match(printed: &Value, built: &Value, sign: i8, profile: &ToleranceProfile) -> bool {
    let b = if sign < 0 { built.negated() } else { built.clone() };
    match (profile.mode, printed, &b) {
        (Mode::Exact, Value::Exact(x), Value::Exact(y)) => x == y,
        _ => profile.float_eq(printed.to_f64(), b.to_f64()),
    }
}

fn columns_match(printed: &[Value], built: &[Value], row_perm: &[usize], profile: &ToleranceProfile) -> Option<i8> {
    [1i8, -1].into_iter().find(|&s| {
        printed
            .iter()
            .enumerate()
            .all(|(i, v)| values_match(v, &built[row_perm[i]], s, profile))
    })
}

/// Matched column count, row permutation, column map and signs.
type Candidate = (usize, Vec<usize>, Vec<Option<usize>>, Vec<i8>);

/// Row permutations tried by [`match_fixture`]; only the identity above
/// eight rows.
fn row_permutations(rows: usize) -> Vec<Vec<usize>> {
    if rows > 8 {
        return vec![(0..rows).collect()];
    }
    (0..rows).permutations(rows).collect()
}

/// Matches a printed matrix against a built frame up to a row permutation,
/// a column permutation and per-column signs.
///
/// Values are compared exactly when both are surds and `profile` is exact,
/// otherwise within the profile's tolerance. When no full match exists the
/// row permutation matching the most columns is reported, with the differing
/// entries of every unmatched printed column.
pub fn match_fixture(built: &FrameMatrix, printed: &FrameMatrix, profile: &ToleranceProfile) -> Result<FixtureMatch> {
    if built.rows() != printed.rows() || built.cols() != printed.cols() {
        return Err(Error::LengthMismatch {
            expected: built.rows() * built.cols(),
            got: printed.rows() * printed.cols(),
        });
    }
    let bcols: Vec<Vec<Value>> = (0..built.cols()).map(|j| built.column(j)).collect();
    let pcols: Vec<Vec<Value>> = (0..printed.cols()).map(|j| printed.column(j)).collect();
    let assign = |perm: &[usize]| {
        let mut used = vec![false; bcols.len()];
        let mut map = vec![None; pcols.len()];
        let mut signs = vec![0i8; pcols.len()];
        for (j, pc) in pcols.iter().enumerate() {
            for (k, bc) in bcols.iter().enumerate() {
                if used[k] {
                    continue;
                }
                if let Some(s) = columns_match(pc, bc, perm, profile) {
                    used[k] = true;
                    map[j] = Some(k);
                    signs[j] = s;
                    break;
                }
            }
        }
        (map, signs)
    };
    let candidates = row_permutations(built.rows());
    let scored: Vec<Candidate> = candidates
        .into_par_iter()
        .map(|perm| {
            let (map, signs) = assign(&perm);
            let count = map.iter().filter(|m| m.is_some()).count();
            (count, perm, map, signs)
        })
        .collect();
    // First best in enumeration order, so the report is deterministic.
    let best = scored
        .into_iter()
        .fold(None::<Candidate>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one permutation");
    let (count, row_perm, col_perm, col_signs) = best;
    let used: Vec<usize> = col_perm.iter().flatten().copied().collect();
    let mut mismatches = Vec::new();
    for (j, m) in col_perm.iter().enumerate() {
        if m.is_some() {
            continue;
        }
        let mut nearest: Option<ColumnMismatch> = None;
        for (k, bc) in bcols.iter().enumerate() {
            if used.contains(&k) {
                continue;
            }
            for s in [1i8, -1] {
                let entries: Vec<(usize, f64, f64)> = pcols[j]
                    .iter()
                    .enumerate()
                    .filter(|(i, v)| !values_match(v, &bc[row_perm[*i]], s, profile))
                    .map(|(i, v)| (i, v.to_f64(), f64::from(s) * bc[row_perm[i]].to_f64()))
                    .collect();
                if nearest.as_ref().is_none_or(|n| entries.len() < n.entries.len()) {
                    nearest = Some(ColumnMismatch {
                        printed_col: j,
                        built_col: k,
                        entries,
                    });
                }
            }
        }
        if let Some(n) = nearest {
            mismatches.push(n);
        }
    }
    Ok(FixtureMatch {
        matched: count == pcols.len(),
        row_perm,
        col_perm,
        col_signs,
        mismatches,
    })
}

/// Reference matrices bundled with the crate, entries stored verbatim.
pub mod fixtures {
    use super::FrameMatrix;
    use crate::error::{Error, Result};

    pub const NAMES: [&str; 9] = ["xi21", "xi22", "h22", "h23", "h33", "k22", "k23", "k33", "normalized_h222"];

    fn text(name: &str) -> Option<&'static str> {
        Some(match name {
            "xi21" => include_str!("../fixtures/xi21.json"),
            "xi22" => include_str!("../fixtures/xi22.json"),
            "h22" => include_str!("../fixtures/h22.json"),
            "h23" => include_str!("../fixtures/h23.json"),
            "h33" => include_str!("../fixtures/h33.json"),
            "k22" => include_str!("../fixtures/k22.json"),
            "k23" => include_str!("../fixtures/k23.json"),
            "k33" => include_str!("../fixtures/k33.json"),
            "normalized_h222" => include_str!("../fixtures/normalized_h222.json"),
            _ => return None,
        })
    }

    pub fn load(name: &str) -> Result<FrameMatrix> {
        let t = text(name).ok_or_else(|| Error::InvalidParams(format!("unknown fixture '{name}'")))?;
        FrameMatrix::from_json(t)
    }
}

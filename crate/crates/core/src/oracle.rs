//! Weighted lattices, functions on them, and an independent graded
//! Gram-Schmidt projector used as ground truth for the closed forms.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{monic_monomial, power_monomial, enumerate_lattice, HomogeneousLattice, MultiIndex};
use crate::scalar::Scalar;

/// A value per lattice point in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction<S> {
    ambient_len: usize,
    degree: usize,
    values: Vec<S>,
}

impl<S: Scalar> LatticeFunction<S> {
    pub fn new(lattice: &HomogeneousLattice, values: Vec<S>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::LengthMismatch {
                expected: lattice.len(),
                got: values.len(),
            });
        }
        Ok(LatticeFunction {
            ambient_len: lattice.ambient_len(),
            degree: lattice.degree(),
            values,
        })
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn<F>(lattice: &HomogeneousLattice, f: F) -> Result<Self>
    where
        F: Fn(&MultiIndex) -> Result<S> + Sync + Send,
    {
        let values = lattice.points().par_iter().map(f).collect::<Result<Vec<S>>>()?;
        Self::new(lattice, values)
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.ambient_len == other.ambient_len && self.degree == other.degree
    }
}

/// A lattice `Z_N^{d+1}` with positive point weights, normalized or not.
#[derive(Debug, Clone)]
pub struct LatticeMeasure<S> {
    lattice: HomogeneousLattice,
    weights: Vec<S>,
}

impl<S: Scalar> LatticeMeasure<S> {
    pub fn new(lattice: HomogeneousLattice, weights: Vec<S>) -> Result<Self> {
        if weights.len() != lattice.len() {
            return Err(Error::LengthMismatch {
                expected: lattice.len(),
                got: weights.len(),
            });
        }
        Ok(LatticeMeasure { lattice, weights })
    }

    pub fn lattice(&self) -> &HomogeneousLattice {
        &self.lattice
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `sum_x f(x) g(x) w(x)` in lattice order.
    pub fn dot(&self, f: &[S], g: &[S]) -> S {
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .fold(S::zero(), |acc, ((a, b), w)| acc + a.clone() * b.clone() * w.clone())
    }

    pub fn inner_product(&self, f: &LatticeFunction<S>, g: &LatticeFunction<S>) -> Result<S> {
        if !f.same_lattice(g)
            || f.ambient_len != self.lattice.ambient_len()
            || f.degree != self.lattice.degree()
        {
            return Err(Error::LatticeMismatch);
        }
        Ok(self.dot(&f.values, &g.values))
    }
}

/// Orthogonal bases of the graded spaces `V_0, ..., V_max` on a weighted
/// lattice, built from plain powers of the first `d` coordinates.
///
/// It shares no code with the closed-form polynomials: it only needs the
/// weights.
#[derive(Debug, Clone)]
pub struct ProjectionOracle<S> {
    measure: LatticeMeasure<S>,
    blocks: Vec<Vec<(Vec<S>, S)>>,
}

impl<S: Scalar> ProjectionOracle<S> {
    pub fn new(measure: LatticeMeasure<S>, max_degree: usize) -> Result<Self> {
        let d = measure.lattice().ambient_len() - 1;
        let points = measure.lattice().points().to_vec();
        let mut blocks: Vec<Vec<(Vec<S>, S)>> = Vec::with_capacity(max_degree + 1);
        for degree in 0..=max_degree {
            let previous: Vec<&(Vec<S>, S)> = blocks.iter().flatten().collect();
            // Orthogonalize against lower degrees in parallel, then within the block.
            let candidates: Vec<Vec<S>> = enumerate_lattice(d, degree)
                .par_iter()
                .map(|gamma| {
                    let mut v: Vec<S> = points
                        .iter()
                        .map(|x| power_monomial(gamma.parts(), &x.to_scalars::<S>()[..d]))
                        .collect();
                    for (u, norm) in &previous {
                        let c = measure.dot(&v, u) / norm.clone();
                        axpy(&mut v, &c, u);
                    }
                    v
                })
                .collect();
            let mut block: Vec<(Vec<S>, S)> = Vec::with_capacity(candidates.len());
            for mut v in candidates {
                let scale = measure.dot(&v, &v);
                for (u, norm) in &block {
                    let c = measure.dot(&v, u) / norm.clone();
                    axpy(&mut v, &c, u);
                }
                let norm = measure.dot(&v, &v);
                if is_negligible(&norm, &scale) {
                    return Err(Error::SingularGram { degree });
                }
                block.push((v, norm));
            }
            blocks.push(block);
        }
        Ok(ProjectionOracle { measure, blocks })
    }

    pub fn measure(&self) -> &LatticeMeasure<S> {
        &self.measure
    }

    pub fn max_degree(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Orthogonal basis of `V_n` with squared norms.
    pub fn block(&self, n: usize) -> &[(Vec<S>, S)] {
        &self.blocks[n]
    }

    /// Orthogonal projection of `f` onto `V_n`.
    pub fn project(&self, f: &[S], n: usize) -> Result<Vec<S>> {
        if n > self.max_degree() {
            return Err(Error::DegreeTooHigh {
                degree: n,
                max: self.max_degree(),
            });
        }
        let mut out = vec![S::zero(); f.len()];
        for (u, norm) in &self.blocks[n] {
            let c = self.measure.dot(f, u) / norm.clone();
            for (o, ui) in out.iter_mut().zip(u) {
                *o = o.clone() + c.clone() * ui.clone();
            }
        }
        Ok(out)
    }

    /// `proj_{V_n}(m_alpha) / scale`, the normalization shared by the Hahn and
    /// Krawtchouk monic projections.
    pub fn project_monomial(&self, alpha: &MultiIndex, n: usize, scale: &S) -> Result<LatticeFunction<S>> {
        let f: Vec<S> = self
            .measure
            .lattice()
            .points()
            .iter()
            .map(|x| monic_monomial(alpha.parts(), &x.to_scalars::<S>()))
            .collect::<Result<_>>()?;
        let p = self.project(&f, n)?;
        let values = p.into_iter().map(|v| v / scale.clone()).collect();
        LatticeFunction::new(self.measure.lattice(), values)
    }
}

fn axpy<S: Scalar>(v: &mut [S], c: &S, u: &[S]) {
    if c.is_zero() {
        return;
    }
    for (vi, ui) in v.iter_mut().zip(u) {
        *vi = vi.clone() - c.clone() * ui.clone();
    }
}

fn is_negligible<S: Scalar>(norm: &S, scale: &S) -> bool {
    if S::EXACT {
        norm.is_zero()
    } else {
        norm.to_float().abs() <= 1e-12 * scale.to_float().abs().max(f64::MIN_POSITIVE)
    }
}

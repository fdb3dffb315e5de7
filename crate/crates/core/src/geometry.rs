//! Tolerance-aware linear algebra on dense real vectors.
//!
//! Spans are represented by an orthonormal basis computed from a thin SVD;
//! every projection, residual and cosine downstream is expressed against such
//! a basis. Exact zeros of the underlying theory become the thresholds in
//! [`Tolerance`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

/// Numerical thresholds standing in for exact zeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular-value cutoff for span construction. `None` selects
    /// `max(rows, cols) * eps * sigma_max`.
    pub rank_tol: Option<f64>,
    /// Largest inner product magnitude still treated as orthogonal.
    pub ortho_tol: f64,
    /// Largest residual norm still treated as the zero vector.
    pub zero_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol: None,
            ortho_tol: 1e-8,
            zero_tol: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn with_ortho_tol(mut self, ortho_tol: f64) -> Self {
        self.ortho_tol = ortho_tol;
        self
    }

    pub fn with_zero_tol(mut self, zero_tol: f64) -> Self {
        self.zero_tol = zero_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rank_ok = self.rank_tol.is_none_or(|t| t >= 0.0);
        if !rank_ok || !(self.ortho_tol >= 0.0) || !(self.zero_tol >= 0.0) {
            return Err(Error::invalid("tolerances must be nonnegative"));
        }
        Ok(())
    }
}

/// Orthonormal basis of a linear span, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// The zero subspace of `ambient_dim`-space.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis matrix, one orthonormal column per basis vector.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Projection without the dimension check; callers guarantee shapes.
    pub(crate) fn project_unchecked(&self, v: &Vector) -> Vector {
        if self.rank() == 0 {
            return Vector::zeros(v.len());
        }
        let coords = self.basis.tr_mul(v);
        &self.basis * coords
    }

    pub(crate) fn residual_unchecked(&self, v: &Vector) -> Vector {
        if self.rank() == 0 {
            return v.clone();
        }
        v - self.project_unchecked(v)
    }

    pub fn contains(&self, v: &Vector, tol: &Tolerance) -> Result<bool> {
        Ok(residual(v, self)?.norm() <= tol.zero_tol)
    }
}

/// Orthonormal basis for the span of `vectors`, all of length `ambient_dim`.
///
/// The rank is the number of singular values above the rank cutoff. The
/// result depends only on the input order and values.
pub fn orthonormal_basis<'a, I>(ambient_dim: usize, vectors: I, tol: &Tolerance) -> Result<Subspace>
where
    I: IntoIterator<Item = &'a Vector>,
{
    let cols: Vec<&Vector> = vectors.into_iter().collect();
    for v in &cols {
        if v.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: v.len(),
            });
        }
    }
    if cols.is_empty() || ambient_dim == 0 {
        return Ok(Subspace::zero(ambient_dim));
    }
    let m = DMatrix::from_fn(ambient_dim, cols.len(), |r, c| cols[c][r]);
    Ok(span_of_matrix(m, tol))
}

/// Orthonormal basis for the column span of `m`.
pub fn span_of_matrix(m: DMatrix<f64>, tol: &Tolerance) -> Subspace {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return Subspace::zero(rows);
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = tol
        .rank_tol
        .unwrap_or_else(|| rows.max(cols) as f64 * f64::EPSILON * sigma_max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff && s > 0.0)
        .map(|(i, _)| i)
        .collect();
    let basis = DMatrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])]);
    Subspace { basis }
}

pub fn project(v: &Vector, s: &Subspace) -> Result<Vector> {
    s.check_dim(v)?;
    Ok(s.project_unchecked(v))
}

pub fn residual(v: &Vector, s: &Subspace) -> Result<Vector> {
    s.check_dim(v)?;
    Ok(s.residual_unchecked(v))
}

/// A cosine value together with a flag marking a zero-norm argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cosine {
    pub value: f64,
    pub degenerate: bool,
}

impl Cosine {
    const DEGENERATE: Cosine = Cosine {
        value: 0.0,
        degenerate: true,
    };
}

pub fn cosine(u: &Vector, v: &Vector, tol: &Tolerance) -> Result<Cosine> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(cosine_unchecked(u, v, tol))
}

pub(crate) fn cosine_unchecked(u: &Vector, v: &Vector, tol: &Tolerance) -> Cosine {
    let nu = u.norm();
    let nv = v.norm();
    if nu <= tol.zero_tol || nv <= tol.zero_tol {
        return Cosine::DEGENERATE;
    }
    Cosine {
        value: (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0),
        degenerate: false,
    }
}

/// Cosine of the residuals of `v` and `u` after projecting out `m`.
pub fn projected_cosine(v: &Vector, u: &Vector, m: &Subspace, tol: &Tolerance) -> Result<Cosine> {
    m.check_dim(v)?;
    m.check_dim(u)?;
    Ok(cosine_unchecked(
        &m.residual_unchecked(v),
        &m.residual_unchecked(u),
        tol,
    ))
}

/// Principal angles between two subspaces in nondecreasing order.
///
/// Angles come from the cosines (singular values of `B1^T B2`) and, below
/// pi/4 where arccos loses precision, from the sines (singular values of the
/// part of the smaller basis orthogonal to the larger).
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.ambient_dim(),
            found: s2.ambient_dim(),
        });
    }
    if s1.rank() == 0 || s2.rank() == 0 {
        return Err(Error::invalid("principal angles need subspaces of rank >= 1"));
    }
    let (big, small) = if s1.rank() >= s2.rank() { (s1, s2) } else { (s2, s1) };
    let cross = big.basis.tr_mul(&small.basis);
    let mut cosines: Vec<f64> = cross.singular_values().iter().copied().collect();
    cosines.sort_by(|a, b| b.total_cmp(a));

    let orth = &small.basis - &big.basis * &cross;
    let mut sines: Vec<f64> = orth.singular_values().iter().copied().collect();
    sines.sort_by(|a, b| a.total_cmp(b));

    Ok(cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            let c = c.clamp(0.0, 1.0);
            if c * c >= 0.5 {
                s.clamp(0.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .collect())
}

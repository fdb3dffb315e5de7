//! Random-projection dimension reduction of embeddings with small Markov
//! boundaries.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::IpeMap;
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_basis, Tolerance, Vector};
use crate::independence::{EmbeddingTable, UndirectedGraph};
use crate::markov::{enumerate_markov_boundaries, EnumerateOptions};
use crate::rng::stream_rng;

/// Target dimension and the constants it is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub n: usize,
    /// `ceil(20 ln(2n) / epsilon_prime^2)`, saturating at `u64::MAX`.
    pub target_dim: u64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    /// Smallest eigenvalue of the unit-normalized Gram matrix.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Largest Markov boundary size.
    pub r: usize,
    /// Distortion amplification constant; 1 when `r = 0`.
    pub c: f64,
    pub seed: u64,
}

/// `ceil(20 ln(2n) / epsilon_prime^2)`.
pub fn jl_dimension(n: usize, epsilon_prime: f64) -> u64 {
    (20.0 * (2.0 * n as f64).ln() / (epsilon_prime * epsilon_prime)).ceil() as u64
}

/// Reduction plan for the unit-normalized rows of `map`.
pub fn reduction_plan(map: &IpeMap, epsilon: f64, boundary_sizes: &[usize], seed: u64) -> Result<ReductionPlan> {
    reduction_plan_for_rows(&map.rows, epsilon, boundary_sizes, seed)
}

/// Reduction plan for arbitrary rows; they are unit-normalized first.
///
/// `C = (r+1)^3 ((2 lambda_max + 2 (r+1)^2) / lambda_min)^r` and
/// `epsilon' = min{1/2, epsilon / C, lambda_min / (2 r^2)}`, the last term
/// dropped when `r = 0`.
pub fn reduction_plan_for_rows(
    rows: &[Vector],
    epsilon: f64,
    boundary_sizes: &[usize],
    seed: u64,
) -> Result<ReductionPlan> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::invalid("no rows to reduce"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if boundary_sizes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: boundary_sizes.len(),
        });
    }
    let unit = unit_rows(rows)?;
    let gram = DMatrix::from_fn(n, n, |i, j| unit[i].dot(&unit[j]));
    let ev = gram.symmetric_eigen().eigenvalues;
    let lambda_min = ev.min();
    let lambda_max = ev.max();
    if !(lambda_min > 0.0) {
        return Err(Error::invalid(format!(
            "Gram matrix is not positive definite (smallest eigenvalue {lambda_min:e})"
        )));
    }
    let r = boundary_sizes.iter().copied().max().unwrap_or(0);
    let rp1 = (r + 1) as f64;
    let c = rp1.powi(3) * ((2.0 * lambda_max + 2.0 * rp1 * rp1) / lambda_min).powi(r as i32);
    let mut epsilon_prime = 0.5f64.min(epsilon / c);
    if r > 0 {
        epsilon_prime = epsilon_prime.min(lambda_min / (2.0 * (r * r) as f64));
    }
    Ok(ReductionPlan {
        n,
        target_dim: jl_dimension(n, epsilon_prime),
        epsilon,
        epsilon_prime,
        lambda_min,
        lambda_max,
        r,
        c,
        seed,
    })
}

fn unit_rows(rows: &[Vector]) -> Result<Vec<Vector>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let s = r.norm();
            if s == 0.0 {
                Err(Error::invalid(format!("row {i} is the zero vector")))
            } else {
                Ok(r / s)
            }
        })
        .collect()
}

/// `k x d` matrix of independent standard normals, filled row by row from
/// stream 0 of `seed`.
pub fn jl_matrix(d: usize, k: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, 0);
    let entries: Vec<f64> = (0..k * d).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_row_slice(k, d, &entries)
}

/// Applies `x -> R x / sqrt(k)` with one shared Gaussian matrix `R`.
pub fn jl_project(vectors: &[Vector], k: usize, seed: u64) -> Result<Vec<Vector>> {
    if k == 0 {
        return Err(Error::invalid("target dimension must be >= 1"));
    }
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let d = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    let r = jl_matrix(d, k, seed) / (k as f64).sqrt();
    Ok(vectors.iter().map(|v| &r * v).collect())
}

/// Largest `|<g(u_i), g(u_j)> - <u_i, u_j>|` over pairs `i < j`.
pub fn max_inner_product_distortion(original: &[Vector], reduced: &[Vector]) -> Result<f64> {
    if original.len() != reduced.len() {
        return Err(Error::DimensionMismatch {
            expected: original.len(),
            found: reduced.len(),
        });
    }
    let mut worst = 0.0f64;
    for i in 0..original.len() {
        for j in (i + 1)..original.len() {
            let d = reduced[i].dot(&reduced[j]) - original[i].dot(&original[j]);
            worst = worst.max(d.abs());
        }
    }
    Ok(worst)
}

/// Neighbor sets of every vertex.
pub fn boundaries_from_graph(g: &UndirectedGraph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect()
}

/// The unique exact Markov boundary of every row of a generic table.
pub fn boundaries_from_table(table: &EmbeddingTable, tol: &Tolerance) -> Result<Vec<Vec<usize>>> {
    (0..table.len())
        .map(|v| {
            let found = enumerate_markov_boundaries(table, v, tol, EnumerateOptions::default())?;
            match found.as_slice() {
                [only] => Ok(only.members.clone()),
                [] => Err(Error::NotFound(format!("no Markov boundary for row {v}"))),
                many => Err(Error::invalid(format!(
                    "row {v} has {} Markov boundaries; a unique one is required",
                    many.len()
                ))),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedViolation {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedOrthogonality {
    pub bound: f64,
    /// Largest `|<residual of i, residual of j>|` given row `i`'s boundary.
    pub max_abs_inner: f64,
    pub pairs_checked: usize,
    pub violations: Vec<ReducedViolation>,
    pub holds: bool,
}

/// For every row `i` and every `j` outside `{i}` and `boundaries[i]`, the
/// inner product of the residuals of the reduced `i` and `j` after projecting
/// out the span of the reduced boundary of `i`.
pub fn verify_reduced_orthogonality(
    reduced: &[Vector],
    boundaries: &[Vec<usize>],
    bound: f64,
    tol: &Tolerance,
) -> Result<ReducedOrthogonality> {
    let n = reduced.len();
    if boundaries.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: boundaries.len(),
        });
    }
    let Some(first) = reduced.first() else {
        return Err(Error::invalid("no reduced vectors"));
    };
    let k = first.len();
    let mut max_abs_inner = 0.0f64;
    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    for (i, m) in boundaries.iter().enumerate() {
        if let Some(&bad) = m.iter().find(|&&b| b >= n || b == i) {
            return Err(Error::invalid(format!("boundary of row {i} contains {bad}")));
        }
        let span = orthonormal_basis(k, m.iter().map(|&b| &reduced[b]), tol)?;
        let ri = span.residual_unchecked(&reduced[i]);
        for j in (0..n).filter(|j| *j != i && !m.contains(j)) {
            let value = ri.dot(&span.residual_unchecked(&reduced[j]));
            pairs_checked += 1;
            max_abs_inner = max_abs_inner.max(value.abs());
            if value.abs() > bound {
                violations.push(ReducedViolation { i, j, value });
            }
        }
    }
    Ok(ReducedOrthogonality {
        bound,
        max_abs_inner,
        pairs_checked,
        holds: violations.is_empty(),
        violations,
    })
}

/// Result of projecting a map's unit-normalized rows and checking the
/// residual bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub plan: ReductionPlan,
    /// Dimension actually used.
    pub k_used: usize,
    /// `k_used` is below the planned dimension, so the bound is not
    /// guaranteed.
    pub best_effort: bool,
    /// Rows were passed through unprojected.
    pub identity_bypass: bool,
    pub max_inner_product_distortion: f64,
    pub check: ReducedOrthogonality,
}

/// Normalizes `rows`, projects them to `min(plan.target_dim, cap)`
/// dimensions (or not at all with `bypass_identity`) and checks the residual
/// bound `plan.epsilon` against `boundaries`.
pub fn reduce_map(
    rows: &[Vector],
    plan: &ReductionPlan,
    boundaries: &[Vec<usize>],
    cap: Option<usize>,
    bypass_identity: bool,
    tol: &Tolerance,
) -> Result<ReductionOutcome> {
    let unit = unit_rows(rows)?;
    let planned = usize::try_from(plan.target_dim).unwrap_or(usize::MAX);
    let (reduced, k_used) = if bypass_identity {
        (unit.clone(), unit[0].len())
    } else {
        let k = match cap {
            Some(c) => planned.min(c),
            None if planned > 1 << 24 => {
                return Err(Error::Refused {
                    what: "planned projection dimension (pass a cap)",
                    value: planned,
                    limit: 1 << 24,
                })
            }
            None => planned,
        };
        (jl_project(&unit, k, plan.seed)?, k)
    };
    let check = verify_reduced_orthogonality(&reduced, boundaries, plan.epsilon, tol)?;
    Ok(ReductionOutcome {
        plan: *plan,
        k_used,
        best_effort: !bypass_identity && k_used < planned,
        identity_bypass: bypass_identity,
        max_inner_product_distortion: max_inner_product_distortion(&unit, &reduced)?,
        check,
    })
}

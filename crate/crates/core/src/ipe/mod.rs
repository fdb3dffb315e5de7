//! Independence-preserving embeddings built from undirected graphs.
//!
//! The embedding of a graph on `n` vertices is read off the inverse of the
//! adjusted adjacency `I + eps * Adj`: with `A = U S U^T` its eigen
//! decomposition, vertex `i` maps to row `i` of `U S^{1/2}`, so the Gram
//! matrix of the rows is `A` itself. When `eps` is a perfect perturbation
//! factor, partial orthogonality of the rows coincides with graph separation.
//! [`reduce`] covers random-projection dimension reduction of such maps.

pub mod reduce;

pub use reduce::{
    boundaries_from_graph, boundaries_from_table, jl_dimension, jl_matrix, jl_project, max_inner_product_distortion, reduce_map,
    reduction_plan, reduction_plan_for_rows, verify_reduced_orthogonality, ReducedOrthogonality, ReductionOutcome,
    ReductionPlan,
};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Tolerance, Vector};
use crate::independence::{partially_orthogonal, EmbeddingTable, UndirectedGraph};
use crate::rng::stream_rng;

/// `I + eps * Adj(graph)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedAdjacency {
    pub graph: UndirectedGraph,
    pub epsilon: f64,
    pub matrix: DMatrix<f64>,
}

pub fn adjusted_adjacency(g: &UndirectedGraph, epsilon: f64) -> AdjustedAdjacency {
    let mut matrix = DMatrix::identity(g.n(), g.n());
    for (a, b) in g.edges() {
        matrix[(a, b)] = epsilon;
        matrix[(b, a)] = epsilon;
    }
    AdjustedAdjacency {
        graph: g.clone(),
        epsilon,
        matrix,
    }
}

fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn principal_submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessOptions {
    /// Inverse entries at or below this magnitude count as zero.
    pub tol: f64,
    /// Largest vertex count checked over all `2^n` subsets.
    pub max_n_exhaustive: usize,
    /// Above `max_n_exhaustive`, check this many random subsets instead of
    /// refusing.
    pub sampled_subsets: Option<usize>,
    pub seed: u64,
}

impl Default for PerfectnessOptions {
    fn default() -> Self {
        PerfectnessOptions {
            tol: 1e-12,
            max_n_exhaustive: 14,
            sampled_subsets: None,
            seed: 0,
        }
    }
}

/// Why a perturbation factor is not perfect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerfectnessWitness {
    /// The adjusted adjacency (or the principal submatrix on `subset`) has an
    /// eigenvalue within `tol` of zero.
    Singular { subset: Vec<usize>, eigenvalue: f64 },
    /// Entry `(i, j)` of the inverse of the principal submatrix on `subset`
    /// is zero exactly when `i` and `j` are not separated by the remaining
    /// vertices, or the other way round.
    Mismatch {
        subset: Vec<usize>,
        i: usize,
        j: usize,
        inverse_entry: f64,
        separated: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub epsilon: f64,
    pub perfect: bool,
    pub witness: Option<PerfectnessWitness>,
    pub subsets_checked: u64,
    /// Only a random sample of subsets was checked.
    pub probabilistic: bool,
}

fn mask_members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Checks one vertex subset; returns the first offending pair.
fn check_subset(adj: &AdjustedAdjacency, subset: &[usize], tol: f64) -> Option<PerfectnessWitness> {
    if subset.len() < 2 {
        return None;
    }
    let sub = principal_submatrix(&adj.matrix, subset);
    let inv = match sub.clone().try_inverse() {
        Some(inv) if sorted_eigenvalues(&sub).iter().all(|e| e.abs() > tol) => inv,
        _ => {
            let eigenvalue = sorted_eigenvalues(&sub)
                .into_iter()
                .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            return Some(PerfectnessWitness::Singular {
                subset: subset.to_vec(),
                eigenvalue,
            });
        }
    };
    let g = &adj.graph;
    let mut keep = vec![false; g.n()];
    for &v in subset {
        keep[v] = true;
    }
    let comp = g.induced_components(&keep);
    for a in 0..subset.len() {
        for b in (a + 1)..subset.len() {
            let (i, j) = (subset[a], subset[b]);
            let separated = comp[i] != comp[j];
            let entry = inv[(a, b)];
            if (entry.abs() <= tol) != separated {
                return Some(PerfectnessWitness::Mismatch {
                    subset: subset.to_vec(),
                    i,
                    j,
                    inverse_entry: entry,
                    separated,
                });
            }
        }
    }
    None
}

/// Tests whether `epsilon` is a perfect perturbation factor for `g`.
///
/// The whole matrix must be invertible, and for every vertex subset `I` the
/// off-diagonal zeros of `(A_eps restricted to I)^{-1}` must be exactly the
/// pairs separated in `g` by the vertices outside `I`. Separation given the
/// complement of `I` is read off the connected components of the subgraph
/// induced by `I`. The reported witness is the one with the lowest subset
/// mask.
pub fn is_perfect_perturbation(
    g: &UndirectedGraph,
    epsilon: f64,
    opts: &PerfectnessOptions,
) -> Result<PerfectnessReport> {
    let n = g.n();
    let adj = adjusted_adjacency(g, epsilon);
    let all: Vec<usize> = (0..n).collect();
    let report = |witness: Option<PerfectnessWitness>, checked: u64, probabilistic: bool| PerfectnessReport {
        epsilon,
        perfect: witness.is_none(),
        witness,
        subsets_checked: checked,
        probabilistic,
    };

    let smallest = sorted_eigenvalues(&adj.matrix)
        .into_iter()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if n > 0 && smallest.abs() <= opts.tol {
        return Ok(report(
            Some(PerfectnessWitness::Singular {
                subset: all,
                eigenvalue: smallest,
            }),
            1,
            false,
        ));
    }

    if n <= opts.max_n_exhaustive.min(63) {
        let total = 1u64 << n;
        let witness = (1..total)
            .into_par_iter()
            .find_map_first(|mask| check_subset(&adj, &mask_members(mask, n), opts.tol));
        return Ok(report(witness, total - 1, false));
    }
    let samples = opts.sampled_subsets.ok_or(Error::Refused {
        what: "vertex count for exhaustive perfectness check",
        value: n,
        limit: opts.max_n_exhaustive,
    })?;
    let witness = (0..samples as u64).into_par_iter().find_map_first(|t| {
        let mut rng = stream_rng(opts.seed, t);
        let subset: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        check_subset(&adj, &subset, opts.tol)
    });
    let witness = witness.or_else(|| check_subset(&adj, &all, opts.tol));
    Ok(report(witness, samples as u64 + 1, true))
}

/// `0.5 / (max_degree + 1)` scaled by ten factors fanning out from 1.
pub fn default_epsilon_candidates(g: &UndirectedGraph) -> Vec<f64> {
    let base = 0.5 / (g.max_degree() + 1) as f64;
    [1.0, 0.9, 1.1, 0.8, 1.2, 0.7, 1.3, 0.6, 1.4, 0.5]
        .iter()
        .map(|f| base * f)
        .collect()
}

/// First candidate that is a perfect perturbation factor for `g`.
pub fn find_perfect_epsilon(g: &UndirectedGraph, candidates: &[f64], opts: &PerfectnessOptions) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::invalid("no perturbation candidates given"));
    }
    let mut failures = Vec::new();
    for &eps in candidates {
        let r = is_perfect_perturbation(g, eps, opts)?;
        match r.witness {
            None => return Ok(eps),
            Some(w) => failures.push(format!("eps={eps}: {w:?}")),
        }
    }
    Err(Error::NotFound(format!(
        "no perfect perturbation factor among {} candidates; {}",
        candidates.len(),
        failures.join("; ")
    )))
}

/// Vertex embedding rows and their Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IpeMap {
    pub graph: UndirectedGraph,
    pub epsilon: f64,
    pub rows: Vec<Vector>,
    pub gram: DMatrix<f64>,
    /// Rows have been rescaled to unit norm.
    pub normalized: bool,
}

/// Builds the embedding of `g` for perturbation factor `epsilon`.
///
/// `A_eps` must be positive definite; otherwise the error names its smallest
/// eigenvalue. Perfectness of `epsilon` is not checked here.
pub fn construct_ipe(g: &UndirectedGraph, epsilon: f64) -> Result<IpeMap> {
    let n = g.n();
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if !epsilon.is_finite() {
        return Err(Error::invalid("epsilon must be finite"));
    }
    let adj = adjusted_adjacency(g, epsilon);
    let lambda_min = sorted_eigenvalues(&adj.matrix)[0];
    let scale_tol = 1e-12 * n as f64;
    if lambda_min.abs() <= scale_tol {
        return Err(Error::Construction {
            reason: "adjusted adjacency is singular".into(),
            eigenvalue: lambda_min,
        });
    }
    if lambda_min < 0.0 {
        return Err(Error::Construction {
            reason: "adjusted adjacency is not positive definite".into(),
            eigenvalue: lambda_min,
        });
    }
    let inverse = adj
        .matrix
        .cholesky()
        .ok_or(Error::Construction {
            reason: "Cholesky factorization failed".into(),
            eigenvalue: lambda_min,
        })?
        .inverse();
    let eig = inverse.symmetric_eigen();
    let mut factor = eig.eigenvectors;
    for (c, &s) in eig.eigenvalues.iter().enumerate() {
        factor.column_mut(c).scale_mut(s.max(0.0).sqrt());
    }
    let rows: Vec<Vector> = (0..n).map(|i| factor.row(i).transpose()).collect();
    let gram = &factor * factor.transpose();
    Ok(IpeMap {
        graph: g.clone(),
        epsilon,
        rows,
        gram,
        normalized: false,
    })
}

impl IpeMap {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Rows rescaled to unit norm; the Gram matrix is rescaled to match.
    pub fn normalized(&self) -> IpeMap {
        let norms: Vec<f64> = self.rows.iter().map(|r| r.norm()).collect();
        IpeMap {
            graph: self.graph.clone(),
            epsilon: self.epsilon,
            rows: self.rows.iter().zip(&norms).map(|(r, s)| r / *s).collect(),
            gram: DMatrix::from_fn(self.n(), self.n(), |i, j| self.gram[(i, j)] / (norms[i] * norms[j])),
            normalized: true,
        }
    }

    /// The rows as a table labelled `v0`, `v1`, ...
    pub fn to_table(&self) -> EmbeddingTable {
        EmbeddingTable::from_vectors(self.rows.clone()).expect("map rows are finite and share one dimension")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpeMismatch {
    pub i: usize,
    pub j: usize,
    pub conditioning: Vec<usize>,
    pub orthogonal: bool,
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpeVerification {
    pub triples_checked: u64,
    pub mismatches: Vec<IpeMismatch>,
    pub faithful: bool,
}

/// Compares partial orthogonality of the map's rows with separation in `g`
/// over every pair `i < j` and every conditioning set avoiding both.
pub fn verify_ipe(map: &IpeMap, g: &UndirectedGraph, tol: &Tolerance, max_n: usize) -> Result<IpeVerification> {
    verify_embedding(&map.to_table(), g, tol, max_n)
}

/// [`verify_ipe`] for rows loaded from elsewhere; row `i` embeds vertex `i`.
pub fn verify_embedding(
    table: &EmbeddingTable,
    g: &UndirectedGraph,
    tol: &Tolerance,
    max_n: usize,
) -> Result<IpeVerification> {
    let n = table.len();
    if g.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n(),
        });
    }
    if n > max_n {
        return Err(Error::Refused {
            what: "vertex count for exhaustive map verification",
            value: n,
            limit: max_n,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let per_pair: Vec<(u64, Vec<IpeMismatch>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let rest: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
            let mut found = Vec::new();
            let count = 1u64 << rest.len();
            for mask in 0..count {
                let c: Vec<usize> = mask_members(mask, rest.len()).into_iter().map(|p| rest[p]).collect();
                let orthogonal = partially_orthogonal(table, i, j, &c, tol).expect("disjoint by construction");
                let separated =
                    crate::independence::graph_separated(g, &[i], &[j], &c).expect("disjoint by construction");
                if orthogonal != separated {
                    found.push(IpeMismatch {
                        i,
                        j,
                        conditioning: c,
                        orthogonal,
                        separated,
                    });
                }
            }
            (count, found)
        })
        .collect();
    let triples_checked = per_pair.iter().map(|p| p.0).sum();
    let mismatches: Vec<IpeMismatch> = per_pair.into_iter().flat_map(|p| p.1).collect();
    Ok(IpeVerification {
        triples_checked,
        faithful: mismatches.is_empty(),
        mismatches,
    })
}

/// Pairwise Markov graph of a Gaussian with the given precision matrix:
/// `i -- j` iff `|precision[i, j]| > tol`.
pub fn imap_from_precision(precision: &DMatrix<f64>, tol: f64) -> Result<UndirectedGraph> {
    let n = precision.nrows();
    if precision.ncols() != n {
        return Err(Error::invalid("precision matrix must be square"));
    }
    if precision.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("precision matrix has non-finite entries"));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (precision[(i, j)] - precision[(j, i)]).abs() > tol {
                return Err(Error::invalid(format!("precision matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    if n > 0 {
        let lambda_min = sorted_eigenvalues(precision)[0];
        if lambda_min <= tol {
            return Err(Error::invalid(format!(
                "precision matrix is not positive definite (smallest eigenvalue {lambda_min:e})"
            )));
        }
    }
    let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
    UndirectedGraph::from_edges(n, edges.filter(|&(i, j)| precision[(i, j)].abs() > tol))
}

//! Markov blankets and boundaries under partial orthogonality.
//!
//! [`enumerate_markov_boundaries`] finds every inclusion-minimal blanket of a
//! target by brute force; [`find_generalized_mb`] is the randomized search for
//! sets whose average post-projection cosine with the remaining vectors
//! vanishes.

mod gmb;

pub use gmb::{
    aggregate_projected_cosines, find_generalized_mb, gmb_score, sweep_candidate_counts, Candidate, GmbParams, GmbResult, GmbScore,
    SelectionTier, SweepPoint,
};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Subspace, Tolerance, Vector};
use crate::independence::{disjoint_check, span_of, EmbeddingTable};

/// A Markov blanket of `target` together with the target's projection onto
/// its span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    pub target: usize,
    pub members: Vec<usize>,
    #[serde(with = "vector_serde")]
    pub projection_of_target: Vector,
}

mod vector_serde {
    use super::Vector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        Ok(Vector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

fn check_target(table: &EmbeddingTable, v: usize, m: &[usize]) -> Result<()> {
    table.check_index(v)?;
    disjoint_check(table.len(), &[&[v], m])
}

/// Blanket test that also returns the span used, for callers that need the
/// projection afterwards.
fn blanket_with_span(table: &EmbeddingTable, v: usize, m: &[usize], tol: &Tolerance) -> (bool, Subspace) {
    let span = span_of(table, m, tol);
    let rv = span.residual_unchecked(table.vector(v));
    if rv.norm() <= tol.zero_tol {
        return (true, span);
    }
    let ok = (0..table.len())
        .filter(|u| *u != v && !m.contains(u))
        .all(|u| {
            let ru = span.residual_unchecked(table.vector(u));
            ru.norm() <= tol.zero_tol || rv.dot(&ru).abs() <= tol.ortho_tol
        });
    (ok, span)
}

/// `v _||_ (everything else) | M`.
pub fn is_markov_blanket(table: &EmbeddingTable, v: usize, m: &[usize], tol: &Tolerance) -> Result<bool> {
    check_target(table, v, m)?;
    Ok(blanket_with_span(table, v, m, tol).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerateOptions {
    /// Largest boundary size searched; `None` searches all sizes.
    pub max_size: Option<usize>,
    /// Refuse tables with more vectors than this.
    pub max_n: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            max_size: None,
            max_n: 20,
        }
    }
}

/// Every inclusion-minimal Markov blanket of `v` with at most `max_size`
/// members, ordered by size and then lexicographically.
///
/// Subsets are visited in nondecreasing size; any superset of a boundary
/// already found is skipped, so each blanket reported is minimal.
pub fn enumerate_markov_boundaries(
    table: &EmbeddingTable,
    v: usize,
    tol: &Tolerance,
    opts: EnumerateOptions,
) -> Result<Vec<BoundarySet>> {
    table.check_index(v)?;
    let limit = opts.max_n.min(64);
    if table.len() > limit {
        return Err(Error::Refused {
            what: "table size for exact boundary enumeration",
            value: table.len(),
            limit,
        });
    }
    let others: Vec<usize> = (0..table.len()).filter(|&u| u != v).collect();
    let max_size = opts.max_size.unwrap_or(others.len()).min(others.len());

    let mut found: Vec<u64> = Vec::new();
    let mut boundaries = Vec::new();
    for size in 0..=max_size {
        for combo in (0..others.len()).combinations(size) {
            let mask = combo.iter().fold(0u64, |acc, &p| acc | (1 << p));
            if found.iter().any(|&f| f & mask == f) {
                continue;
            }
            let members: Vec<usize> = combo.iter().map(|&p| others[p]).collect();
            let (is_blanket, span) = blanket_with_span(table, v, &members, tol);
            if is_blanket {
                found.push(mask);
                boundaries.push(BoundarySet {
                    target: v,
                    projection_of_target: span.project_unchecked(table.vector(v)),
                    members,
                });
            }
        }
    }
    Ok(boundaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[Vec<f64>]) -> EmbeddingTable {
        EmbeddingTable::from_rows(rows).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// {e1, e2, e1+e2, e3} in R^3.
    fn four() -> EmbeddingTable {
        table(&[vec![1., 0., 0.], vec![0., 1., 0.], vec![1., 1., 0.], vec![0., 0., 1.]])
    }

    #[test]
    fn blanket_examples() {
        let t = four();
        assert!(is_markov_blanket(&t, 0, &[1, 2, 3], &tol()).unwrap());
        // e1 lies in span{e2, e1+e2}: zero residual.
        assert!(is_markov_blanket(&t, 0, &[1, 2], &tol()).unwrap());
        // Given e2 the residual of e1 is e1, and e1+e2 leaves residual e1.
        assert!(!is_markov_blanket(&t, 0, &[1], &tol()).unwrap());
        assert!(is_markov_blanket(&t, 0, &[0], &tol()).is_err());
    }

    #[test]
    fn orthogonal_target_has_empty_boundary() {
        let t = table(&[vec![0., 0., 1.], vec![1., 0., 0.], vec![1., 1., 0.]]);
        let b = enumerate_markov_boundaries(&t, 0, &tol(), EnumerateOptions::default()).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].members.is_empty());
    }

    #[test]
    fn three_boundaries_share_one_projection() {
        // a = e1+e2, b = e1-e2, c = e2, target e1. Hand check of all seven
        // nonempty subsets: every pair spans the (e1, e2) plane, so the target
        // residual is zero; each singleton leaves a target residual with a
        // nonzero inner product against some remaining residual.
        let t = table(&[vec![1., 1., 0.], vec![1., -1., 0.], vec![0., 1., 0.], vec![1., 0., 0.]]);
        let b = enumerate_markov_boundaries(&t, 3, &tol(), EnumerateOptions::default()).unwrap();
        let members: Vec<Vec<usize>> = b.iter().map(|s| s.members.clone()).collect();
        assert_eq!(members, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        for s in &b {
            assert!((&s.projection_of_target - t.vector(3)).norm() < 1e-12);
        }
    }

    #[test]
    fn unique_boundary_in_four_vector_table() {
        let b = enumerate_markov_boundaries(&four(), 0, &tol(), EnumerateOptions::default()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].members, vec![1, 2]);
    }

    #[test]
    fn size_guard_refuses() {
        let rows: Vec<Vec<f64>> = (0..21).map(|i| vec![i as f64, 1.0]).collect();
        let err = enumerate_markov_boundaries(&table(&rows), 0, &tol(), EnumerateOptions::default()).unwrap_err();
        assert!(err.is_refusal());
        assert!(err.to_string().contains("20"));
    }

    #[test]
    fn max_size_truncates_search() {
        let opts = EnumerateOptions {
            max_size: Some(1),
            ..Default::default()
        };
        let b = enumerate_markov_boundaries(&four(), 0, &tol(), opts).unwrap();
        assert!(b.is_empty());
    }
}

//! Independence models over finite index sets.
//!
//! Two concrete relations are provided: partial orthogonality of table
//! vectors ([`PartialOrthogonality`]) and separation in an undirected graph
//! ([`GraphSeparation`]). Both implement [`IndependenceModel`], which is what
//! the axiom checker in [`axioms`] consumes.

pub mod axioms;
mod graph;
mod table;

use serde::{Deserialize, Serialize};

pub use axioms::{check_axioms, Axiom, AxiomReport, AxiomViolation, CheckConfig};
pub use graph::{graph_separated, GraphSeparation, UndirectedGraph};
pub use table::EmbeddingTable;

use crate::error::{Error, Result};
use crate::geometry::{orthonormal_basis, Subspace, Tolerance, Vector};

/// A ternary relation `A _||_ B | C` over disjoint subsets of `0..n`.
pub trait IndependenceModel: Sync {
    fn universe_size(&self) -> usize;

    /// Callers guarantee the three sets are disjoint and in range.
    fn independent(&self, a: &[usize], b: &[usize], c: &[usize]) -> bool;
}

/// A disjoint triple `(A, B, C)` of index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceTriple {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

impl IndependenceTriple {
    pub fn new(a: Vec<usize>, b: Vec<usize>, c: Vec<usize>, n: usize) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::invalid("A and B must be nonempty"));
        }
        disjoint_check(n, &[&a, &b, &c])?;
        Ok(IndependenceTriple { a, b, c })
    }

    pub fn holds_in(&self, model: &dyn IndependenceModel) -> bool {
        model.independent(&self.a, &self.b, &self.c)
    }
}

/// Errors unless every index is below `n` and the sets are pairwise disjoint
/// (and free of repeats).
pub(crate) fn disjoint_check(n: usize, sets: &[&[usize]]) -> Result<()> {
    let mut seen = vec![false; n];
    for set in sets {
        for &i in *set {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if seen[i] {
                return Err(Error::invalid(format!("index {i} appears in more than one set")));
            }
            seen[i] = true;
        }
    }
    Ok(())
}

pub(crate) fn span_of(table: &EmbeddingTable, idx: &[usize], tol: &Tolerance) -> Subspace {
    orthonormal_basis(table.dim(), idx.iter().map(|&i| table.vector(i)), tol)
        .expect("table vectors share one dimension")
}

fn residual_orthogonal(ra: &Vector, rb: &Vector, tol: &Tolerance) -> bool {
    ra.norm() <= tol.zero_tol || rb.norm() <= tol.zero_tol || ra.dot(rb).abs() <= tol.ortho_tol
}

/// `a _||_ b | C`: the residuals of `v_a` and `v_b` after projecting out
/// `span(C)` have (numerically) zero inner product. A zero residual is
/// orthogonal to everything.
pub fn partially_orthogonal(
    table: &EmbeddingTable,
    a: usize,
    b: usize,
    c: &[usize],
    tol: &Tolerance,
) -> Result<bool> {
    if a == b {
        return Err(Error::invalid("a and b must differ"));
    }
    disjoint_check(table.len(), &[&[a], &[b], c])?;
    let span = span_of(table, c, tol);
    Ok(residual_orthogonal(
        &span.residual_unchecked(table.vector(a)),
        &span.residual_unchecked(table.vector(b)),
        tol,
    ))
}

/// Set-level partial orthogonality, holding iff every pair in `A x B` is
/// partially orthogonal given `C`.
pub fn set_partially_orthogonal(
    table: &EmbeddingTable,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    tol: &Tolerance,
) -> Result<bool> {
    disjoint_check(table.len(), &[a, b, c])?;
    Ok(set_orthogonal_unchecked(table, a, b, c, tol))
}

fn set_orthogonal_unchecked(
    table: &EmbeddingTable,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    tol: &Tolerance,
) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let span = span_of(table, c, tol);
    let rb: Vec<Vector> = b
        .iter()
        .map(|&j| span.residual_unchecked(table.vector(j)))
        .collect();
    a.iter().all(|&i| {
        let ra = span.residual_unchecked(table.vector(i));
        rb.iter().all(|r| residual_orthogonal(&ra, r, tol))
    })
}

/// Partial orthogonality of a table's vectors as an independence model.
#[derive(Debug, Clone, Copy)]
pub struct PartialOrthogonality<'a> {
    pub table: &'a EmbeddingTable,
    pub tol: Tolerance,
}

impl<'a> PartialOrthogonality<'a> {
    pub fn new(table: &'a EmbeddingTable, tol: Tolerance) -> Self {
        PartialOrthogonality { table, tol }
    }
}

impl IndependenceModel for PartialOrthogonality<'_> {
    fn universe_size(&self) -> usize {
        self.table.len()
    }

    fn independent(&self, a: &[usize], b: &[usize], c: &[usize]) -> bool {
        set_orthogonal_unchecked(self.table, a, b, c, &self.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pairwise_examples() {
        let t = EmbeddingTable::from_rows(&[vec![1., 0., 0.], vec![0., 1., 0.]]).unwrap();
        assert!(partially_orthogonal(&t, 0, 1, &[], &tol()).unwrap());

        // Residuals given e1 are (0,1,0) and (0,-1,0): inner product -1.
        let t = EmbeddingTable::from_rows(&[vec![1., 1., 0.], vec![1., -1., 0.], vec![1., 0., 0.]]).unwrap();
        assert!(!partially_orthogonal(&t, 0, 1, &[2], &tol()).unwrap());
        assert!(partially_orthogonal(&t, 0, 1, &[], &tol()).unwrap());

        let t = EmbeddingTable::from_rows(&[vec![2., 0., 0.], vec![1., 1., 1.], vec![1., 0., 0.]]).unwrap();
        assert!(partially_orthogonal(&t, 0, 1, &[2], &tol()).unwrap());
    }

    #[test]
    fn pairwise_errors() {
        let t = EmbeddingTable::from_rows(&[vec![1., 0.], vec![0., 1.]]).unwrap();
        assert!(partially_orthogonal(&t, 0, 0, &[], &tol()).is_err());
        assert!(partially_orthogonal(&t, 0, 1, &[1], &tol()).is_err());
        assert!(matches!(
            partially_orthogonal(&t, 0, 5, &[], &tol()),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn set_examples() {
        let t = EmbeddingTable::from_rows(&[vec![1., 0., 0.], vec![0., 1., 0.], vec![0., 0., 1.]]).unwrap();
        assert!(set_partially_orthogonal(&t, &[0], &[1, 2], &[], &tol()).unwrap());
        assert!(set_partially_orthogonal(&t, &[0], &[], &[1], &tol()).unwrap());
        assert!(set_partially_orthogonal(&t, &[0], &[0], &[], &tol()).is_err());

        let t = EmbeddingTable::from_rows(&[vec![1., 0.], vec![1., 1.]]).unwrap();
        assert!(!set_partially_orthogonal(&t, &[0], &[1], &[], &tol()).unwrap());
    }

    fn small_table() -> impl Strategy<Value = EmbeddingTable> {
        (2usize..=5, 3usize..=7).prop_flat_map(|(d, n)| {
            prop::collection::vec(prop::collection::vec(-2i8..=2, d), n).prop_map(|rows| {
                let rows: Vec<Vec<f64>> = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(f64::from).collect())
                    .collect();
                EmbeddingTable::from_rows(&rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn symmetry_and_zero_residual_convention(t in small_table(), pick in any::<u64>()) {
            let n = t.len();
            let a = (pick % n as u64) as usize;
            let b = (a + 1) % n;
            let c: Vec<usize> = (0..n).filter(|&i| i != a && i != b && (pick >> (i + 8)) & 1 == 1).collect();
            let ab = partially_orthogonal(&t, a, b, &c, &tol()).unwrap();
            let ba = partially_orthogonal(&t, b, a, &c, &tol()).unwrap();
            prop_assert_eq!(ab, ba);

            let span = span_of(&t, &c, &tol());
            if span.residual_unchecked(t.vector(a)).norm() <= tol().zero_tol {
                for other in (0..n).filter(|&i| i != a && !c.contains(&i)) {
                    prop_assert!(partially_orthogonal(&t, a, other, &c, &tol()).unwrap());
                }
            }
        }
    }
}

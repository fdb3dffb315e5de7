use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::Vector;

/// A labeled finite set of vectors of one common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    labels: Vec<String>,
    vectors: Vec<Vector>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(labels: Vec<String>, vectors: Vec<Vector>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::invalid(format!(
                "{} labels for {} vectors",
                labels.len(),
                vectors.len()
            )));
        }
        if vectors.is_empty() {
            return Err(Error::invalid("embedding table is empty"));
        }
        let dim = vectors[0].len();
        if dim == 0 {
            return Err(Error::invalid("vectors must have dimension >= 1"));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, (label, v)) in labels.iter().zip(&vectors).enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("vector '{label}' has a non-finite coordinate")));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate label '{label}'")));
            }
        }
        Ok(EmbeddingTable {
            labels,
            vectors,
            index,
        })
    }

    /// Table with labels `v0`, `v1`, ...
    pub fn from_vectors(vectors: Vec<Vector>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|i| format!("v{i}")).collect();
        Self::new(labels, vectors)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_vectors(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &Vector {
        &self.vectors[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Indices of `labels`, failing on the first unknown one.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| Error::NotFound(format!("label '{}'", l.as_ref())))
            })
            .collect()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Copy with every nonzero vector scaled to unit length.
    pub fn normalized(&self) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let n = v.norm();
                if n > 0.0 {
                    v / n
                } else {
                    v.clone()
                }
            })
            .collect();
        EmbeddingTable {
            labels: self.labels.clone(),
            vectors,
            index: self.index.clone(),
        }
    }

    /// Sub-table keeping the records at `keep`, in that order.
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        for &i in keep {
            self.check_index(i)?;
        }
        Self::new(
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
            keep.iter().map(|&i| self.vectors[i].clone()).collect(),
        )
    }
}

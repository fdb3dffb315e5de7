//! Analysis of finite sets of vectors as an independence model under
//! partial orthogonality.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: spans, projections, residuals, cosines and principal angles.
//! - [`independence`]: embedding tables, undirected graphs, the partial
//!   orthogonality and graph separation relations, and randomized checks of
//!   the graphoid axioms.
//! - [`markov`]: exact Markov blanket/boundary enumeration, the average
//!   post-projection cosine score and the randomized generalized Markov
//!   boundary search.
//! - [`ipe`]: independence-preserving embeddings built from graphs, perfect
//!   perturbation factors, and Johnson-Lindenstrauss reduction.
//! - [`synth`]: seeded synthetic instances with known ground truth.

pub mod error;
pub mod geometry;
pub mod independence;
pub mod ipe;
pub mod markov;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{Subspace, Tolerance, Vector};
pub use independence::{EmbeddingTable, IndependenceModel, UndirectedGraph};

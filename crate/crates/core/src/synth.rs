//! Seeded synthetic instances with known ground truth.
//!
//! Every generator draws from `stream_rng(seed, 0)` only, so an instance is
//! fully determined by its configuration and seed.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::Vector;
use crate::independence::{EmbeddingTable, UndirectedGraph};
use crate::rng::{stream_rng, StreamRng};

fn gaussian(rng: &mut StreamRng, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

fn unit(rng: &mut StreamRng, d: usize) -> Vector {
    loop {
        let v = gaussian(rng, d);
        let s = v.norm();
        if s > 1e-6 {
            return v / s;
        }
    }
}

/// Random unit vector orthogonal to the orthonormal `frame`.
fn unit_orthogonal_to(rng: &mut StreamRng, d: usize, frame: &[Vector]) -> Vector {
    loop {
        let mut v = gaussian(rng, d);
        for f in frame {
            v -= f * f.dot(&v);
        }
        let s = v.norm();
        if s > 1e-6 {
            return v / s;
        }
    }
}

/// `count` orthonormal vectors in `R^d` (Gram-Schmidt on Gaussians).
fn orthonormal_frame(rng: &mut StreamRng, d: usize, count: usize) -> Vec<Vector> {
    let mut frame = Vec::with_capacity(count);
    for _ in 0..count {
        let v = unit_orthogonal_to(rng, d, &frame);
        frame.push(v);
    }
    frame
}

fn labelled(labels: Vec<String>, vectors: Vec<Vector>) -> EmbeddingTable {
    EmbeddingTable::new(labels, vectors).expect("generated labels are unique and values finite")
}

/// `n` rows of independent standard normals in `R^d`, labelled `v0`, ...
pub fn gaussian_table(n: usize, d: usize, seed: u64) -> EmbeddingTable {
    let mut rng = stream_rng(seed, 0);
    EmbeddingTable::from_vectors((0..n).map(|_| gaussian(&mut rng, d)).collect()).expect("finite rows")
}

pub fn random_unit_vectors(count: usize, d: usize, seed: u64) -> Vec<Vector> {
    let mut rng = stream_rng(seed, 0);
    (0..count).map(|_| unit(&mut rng, d)).collect()
}

fn ternary_row(rng: &mut StreamRng, d: usize, density: f64) -> Vector {
    loop {
        let v = Vector::from_fn(d, |_, _| {
            if rng.random_bool(density) {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        });
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}

/// Nonzero rows with entries in `{-1, 0, 1}`, each coordinate nonzero with
/// probability `density`. Sparse integer rows make exact orthogonalities
/// common, so axiom premises are frequently satisfied.
pub fn sparse_ternary_table(n: usize, d: usize, density: f64, seed: u64) -> EmbeddingTable {
    let mut rng = stream_rng(seed, 0);
    EmbeddingTable::from_vectors((0..n).map(|_| ternary_row(&mut rng, d, density)).collect()).expect("finite rows")
}

/// Like [`sparse_ternary_table`], redrawn until the rows are linearly
/// independent. Requires `n <= d`.
pub fn independent_ternary_table(n: usize, d: usize, density: f64, seed: u64) -> EmbeddingTable {
    assert!(n <= d, "{n} independent rows need dimension >= {n}");
    let mut rng = stream_rng(seed, 0);
    loop {
        let rows: Vec<Vector> = (0..n).map(|_| ternary_row(&mut rng, d, density)).collect();
        let m = DMatrix::from_columns(&rows);
        if m.rank(1e-9) == n {
            return EmbeddingTable::from_vectors(rows).expect("finite rows");
        }
    }
}

/// Erdos-Renyi graph: every pair is an edge with probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> UndirectedGraph {
    let mut rng = stream_rng(seed, 0);
    let mut g = UndirectedGraph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                g.add_edge(i, j).expect("fresh pair");
            }
        }
    }
    g
}

fn tree_edges(rng: &mut StreamRng, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    (1..n)
        .map(|i| (order[rng.random_range(0..i)], order[i]))
        .collect()
}

/// Random recursive tree on shuffled vertex labels.
pub fn random_tree(n: usize, seed: u64) -> UndirectedGraph {
    let mut rng = stream_rng(seed, 0);
    UndirectedGraph::from_edges(n, tree_edges(&mut rng, n)).expect("tree edges are distinct")
}

/// A random spanning tree plus every other pair with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, seed: u64) -> UndirectedGraph {
    let mut rng = stream_rng(seed, 0);
    let mut g = UndirectedGraph::from_edges(n, tree_edges(&mut rng, n)).expect("tree edges are distinct");
    for i in 0..n {
        for j in (i + 1)..n {
            if !g.has_edge(i, j) && rng.random_bool(p) {
                g.add_edge(i, j).expect("fresh pair");
            }
        }
    }
    g
}

/// Shape of the planted generalized-boundary instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedGmbConfig {
    pub dim: usize,
    pub planted: usize,
    /// Distractors come in `+/-` pairs.
    pub distractor_pairs: usize,
    /// Weight of the planted direction in the target; the rest goes to a
    /// direction shared with the distractors.
    pub target_planted_weight: f64,
    /// Magnitude of the shared direction in each distractor.
    pub distractor_shared: f64,
    /// Weight of the planted direction in each distractor.
    pub distractor_planted: f64,
    /// Planted mixing coefficients are uniform on `[coef_low, 1)`.
    pub coef_low: f64,
}

impl Default for PlantedGmbConfig {
    fn default() -> Self {
        PlantedGmbConfig {
            dim: 96,
            planted: 3,
            distractor_pairs: 30,
            target_planted_weight: 0.8,
            distractor_shared: 0.8,
            distractor_planted: 0.15,
            coef_low: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedGmb {
    pub table: EmbeddingTable,
    pub target: usize,
    /// Indices of the planted boundary, ascending.
    pub planted: Vec<usize>,
}

impl PlantedGmb {
    pub fn planted_labels(&self) -> Vec<String> {
        self.planted.iter().map(|&i| self.table.label(i).to_string()).collect()
    }
}

/// Table `[target, p0.., d0..]` whose generalized boundary is the planted
/// set.
///
/// The planted vectors are orthonormal; `w` is a positive mix of them and
/// `q` a unit direction orthogonal to all of them. The target is
/// `a w + sqrt(1 - a^2) q`. Each distractor is `+/-c q + b w + rest * noise`
/// with noise orthogonal to the planted span and `q`. Projecting out the
/// planted span leaves the target along `q`, where the `+/-` pairs cancel in
/// the average cosine.
pub fn planted_gmb(cfg: &PlantedGmbConfig, seed: u64) -> PlantedGmb {
    let mut rng = stream_rng(seed, 0);
    let frame = orthonormal_frame(&mut rng, cfg.dim, cfg.planted + 1);
    let (planted, q) = (&frame[..cfg.planted], &frame[cfg.planted]);
    let mut w = Vector::zeros(cfg.dim);
    for p in planted {
        w += p * rng.random_range(cfg.coef_low..1.0);
    }
    w /= w.norm();
    let a = cfg.target_planted_weight;
    let target = &w * a + q * (1.0 - a * a).sqrt();

    let mut labels = vec!["target".to_string()];
    let mut vectors = vec![target];
    for (i, p) in planted.iter().enumerate() {
        labels.push(format!("p{i}"));
        vectors.push(p.clone());
    }
    let (c, b) = (cfg.distractor_shared, cfg.distractor_planted);
    let rest = (1.0 - c * c - b * b).max(0.0).sqrt();
    for pair in 0..cfg.distractor_pairs {
        for (sign, tag) in [(1.0, 'a'), (-1.0, 'b')] {
            let noise = unit_orthogonal_to(&mut rng, cfg.dim, &frame);
            labels.push(format!("d{pair}{tag}"));
            vectors.push(q * (sign * c) + &w * b + noise * rest);
        }
    }
    PlantedGmb {
        table: labelled(labels, vectors),
        target: 0,
        planted: (1..=cfg.planted).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryConfig {
    pub dim: usize,
    pub categories: usize,
    pub members: usize,
    /// Unrelated vectors, available for null sampling.
    pub fillers: usize,
    /// Weight of the category center in each member.
    pub center_weight: f64,
}

impl Default for CategoryConfig {
    fn default() -> Self {
        CategoryConfig {
            dim: 48,
            categories: 4,
            members: 6,
            fillers: 120,
            center_weight: 0.8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CategoryInstance {
    pub table: EmbeddingTable,
    /// Category label (also a row label: the center) and member labels.
    pub categories: Vec<(String, Vec<String>)>,
}

/// Categories `cat{c}` with members `cat{c}_{j} = w center + sqrt(1-w^2) noise`
/// plus `filler{i}` rows; all unit vectors.
pub fn clustered_categories(cfg: &CategoryConfig, seed: u64) -> CategoryInstance {
    let mut rng = stream_rng(seed, 0);
    let w = cfg.center_weight;
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    let mut categories = Vec::new();
    for c in 0..cfg.categories {
        let center = unit(&mut rng, cfg.dim);
        let name = format!("cat{c}");
        labels.push(name.clone());
        vectors.push(center.clone());
        let mut members = Vec::new();
        for j in 0..cfg.members {
            let m = &center * w + unit(&mut rng, cfg.dim) * (1.0 - w * w).sqrt();
            let label = format!("cat{c}_{j}");
            labels.push(label.clone());
            vectors.push(&m / m.norm());
            members.push(label);
        }
        categories.push((name, members));
    }
    for i in 0..cfg.fillers {
        labels.push(format!("filler{i}"));
        vectors.push(unit(&mut rng, cfg.dim));
    }
    CategoryInstance {
        table: labelled(labels, vectors),
        categories,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingConfig {
    pub dim: usize,
    /// Rows dominated by the shared noise direction.
    pub noisy: usize,
    pub fillers: usize,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig {
            dim: 64,
            noisy: 60,
            fillers: 140,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankingInstance {
    pub table: EmbeddingTable,
    pub target: usize,
    /// Nearest neighbor of the target before projection, aligned with the
    /// noise direction.
    pub noise_neighbor: usize,
    /// Row sharing the target's non-noise direction.
    pub tied: usize,
}

/// A target `0.6 z + 0.8 s` whose nearest neighbor is `0.98 z + ...` while
/// the tied row is `0.65 s + ...`. Many `noisy` rows are `0.8 z + ...`, so
/// random subspaces tend to contain `z` and projecting them out exposes the
/// tie through `s`.
pub fn noise_neighbor_ranking(cfg: &RankingConfig, seed: u64) -> RankingInstance {
    let mut rng = stream_rng(seed, 0);
    let frame = orthonormal_frame(&mut rng, cfg.dim, 2);
    let (z, s) = (&frame[0], &frame[1]);
    let mix = |a: &Vector, wa: f64, rng: &mut StreamRng| a * wa + unit_orthogonal_to(rng, cfg.dim, &frame) * (1.0 - wa * wa).sqrt();
    let target = z * 0.6 + s * 0.8;
    let neighbor = mix(z, 0.98, &mut rng);
    let tied = mix(s, 0.65, &mut rng);
    let mut labels = vec!["target".to_string(), "neighbor".to_string(), "tied".to_string()];
    let mut vectors = vec![target, neighbor, tied];
    for i in 0..cfg.noisy {
        labels.push(format!("noisy{i}"));
        vectors.push(mix(z, 0.8, &mut rng));
    }
    for i in 0..cfg.fillers {
        labels.push(format!("filler{i}"));
        vectors.push(unit(&mut rng, cfg.dim));
    }
    RankingInstance {
        table: labelled(labels, vectors),
        target: 0,
        noise_neighbor: 1,
        tied: 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleConfig {
    pub dim: usize,
    pub fillers: usize,
    /// Norm of the perturbation added to the first center.
    pub noise: f64,
}

impl Default for AngleConfig {
    fn default() -> Self {
        AngleConfig {
            dim: 64,
            fillers: 100,
            noise: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AngleInstance {
    pub table: EmbeddingTable,
    pub boundary: Vec<String>,
    pub reference: Vec<String>,
}

/// Boundary `{center1, center2}`, reference `center1 + noise` (normalized),
/// plus unit `filler{i}` rows.
pub fn angle_instance(cfg: &AngleConfig, seed: u64) -> AngleInstance {
    let mut rng = stream_rng(seed, 0);
    let c1 = unit(&mut rng, cfg.dim);
    let c2 = unit(&mut rng, cfg.dim);
    let r = &c1 + unit(&mut rng, cfg.dim) * cfg.noise;
    let mut labels = vec!["center1".to_string(), "center2".to_string(), "reference".to_string()];
    let mut vectors = vec![c1, c2, &r / r.norm()];
    for i in 0..cfg.fillers {
        labels.push(format!("filler{i}"));
        vectors.push(unit(&mut rng, cfg.dim));
    }
    AngleInstance {
        table: labelled(labels, vectors),
        boundary: vec!["center1".into(), "center2".into()],
        reference: vec!["reference".into()],
    }
}

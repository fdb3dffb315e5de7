use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{disjoint_check, IndependenceModel};
use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphRepr> for UndirectedGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        UndirectedGraph::from_edges(r.n, r.edges)
    }
}

impl From<UndirectedGraph> for GraphRepr {
    fn from(g: UndirectedGraph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.into_iter().collect(),
        }
    }
}

impl UndirectedGraph {
    pub fn empty(n: usize) -> Self {
        UndirectedGraph {
            n,
            edges: BTreeSet::new(),
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from endpoint pairs. Self-loops, out-of-range endpoints
    /// and repeated edges (in either orientation) are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
        Self::from_edges(n, edges).expect("complete edges are valid")
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        for v in [a, b] {
            if v >= self.n {
                return Err(Error::IndexOutOfRange { index: v, len: self.n });
            }
        }
        if a == b {
            return Err(Error::invalid(format!("self-loop on vertex {a}")));
        }
        let key = (a.min(b), a.max(b));
        if !self.edges.insert(key) {
            return Err(Error::invalid(format!("duplicate edge {}-{}", key.0, key.1)));
        }
        self.neighbors[a].push(b);
        self.neighbors[b].push(a);
        self.neighbors[a].sort_unstable();
        self.neighbors[b].sort_unstable();
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Parses the plain-text graph format: first meaningful line is the vertex
    /// count, every further nonempty line holds two 0-based endpoints. Lines
    /// starting with `#` are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, first) = lines
            .next()
            .ok_or_else(|| Error::invalid("graph file has no vertex count line"))?;
        let n: usize = first
            .parse()
            .map_err(|_| Error::invalid(format!("line {line_no}: bad vertex count '{first}'")))?;
        let mut g = Self::empty(n);
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::invalid(format!(
                    "line {line_no}: expected two vertex indices, found '{line}'"
                )));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::invalid(format!("line {line_no}: bad vertex index '{s}'")))
            };
            let (a, b) = (parse(fields[0])?, parse(fields[1])?);
            g.add_edge(a, b)
                .map_err(|e| Error::invalid(format!("line {line_no}: {e}")))?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    /// Vertices reachable from `start` without entering `blocked`.
    fn reach(&self, start: &[usize], blocked: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &s in start {
            if !blocked[s] && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if !blocked[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Connected-component label of every vertex in the subgraph induced by
    /// `keep`; vertices outside `keep` get `usize::MAX`.
    pub fn induced_components(&self, keep: &[bool]) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let blocked: Vec<bool> = keep.iter().map(|k| !k).collect();
        let mut next = 0;
        for v in 0..self.n {
            if keep[v] && comp[v] == usize::MAX {
                for (w, r) in self.reach(&[v], &blocked).into_iter().enumerate() {
                    if r {
                        comp[w] = next;
                    }
                }
                next += 1;
            }
        }
        comp
    }
}

/// True iff every path from `a` to `b` passes through `c`.
pub fn graph_separated(g: &UndirectedGraph, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
    disjoint_check(g.n(), &[a, b, c])?;
    Ok(separated_unchecked(g, a, b, c))
}

fn separated_unchecked(g: &UndirectedGraph, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let mut blocked = vec![false; g.n()];
    for &v in c {
        blocked[v] = true;
    }
    let seen = g.reach(a, &blocked);
    !b.iter().any(|&v| seen[v])
}

/// Graph separation as an independence model.
#[derive(Debug, Clone, Copy)]
pub struct GraphSeparation<'a> {
    pub graph: &'a UndirectedGraph,
}

impl IndependenceModel for GraphSeparation<'_> {
    fn universe_size(&self) -> usize {
        self.graph.n()
    }

    fn independent(&self, a: &[usize], b: &[usize], c: &[usize]) -> bool {
        separated_unchecked(self.graph, a, b, c)
    }
}

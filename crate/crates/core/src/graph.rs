//! Undirected weighted graphs, their Laplacians, and seed vectors.
//!
//! A [`Graph`] is validated once at construction (no self-loops, no
//! duplicate edges, strictly positive weights, a single connected
//! component) and is immutable afterwards. Adjacency is kept sparse; the
//! Laplacians are materialized densely because every downstream consumer
//! hands them to a dense eigensolver.

use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, Write};

use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    neighbors: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an undirected edge list in which
    /// every edge appears once.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "a graph needs at least 2 vertices, got {n}"
            )));
        }
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        let mut neighbors = vec![Vec::new(); n];
        for (i, j, weight) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidEdge {
                    i,
                    j,
                    weight,
                    reason: "vertex index out of range",
                });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidEdge {
                    i,
                    j,
                    weight,
                    reason: "weight must be finite and positive",
                });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let (a, b) = (i.min(j), i.max(j));
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge(a, b));
            }
            stored.push(Edge { i, j, weight });
            neighbors[i].push((j, weight));
            neighbors[j].push((i, weight));
        }
        for row in &mut neighbors {
            row.sort_by_key(|&(j, _)| j);
        }
        let degrees = neighbors
            .iter()
            .map(|row| row.iter().map(|&(_, w)| w).sum())
            .collect();
        let graph = Graph {
            n,
            edges: stored,
            neighbors,
            degrees,
        };
        let components = graph.component_count();
        if components > 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(graph)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in insertion order, as given to [`Graph::new`].
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    /// Neighbors of `i` sorted by index, with edge weights.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    pub fn check_vertex(&self, vertex: usize) -> Result<()> {
        if vertex < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex, n: self.n })
        }
    }

    /// Sum of degrees over `set`. Repeated vertices are counted once.
    pub fn volume(&self, set: &[usize]) -> Result<f64> {
        let mut seen = HashSet::with_capacity(set.len());
        let mut vol = 0.0;
        for &v in set {
            self.check_vertex(v)?;
            if seen.insert(v) {
                vol += self.degrees[v];
            }
        }
        Ok(vol)
    }

    pub fn total_volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    pub fn adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            a[[e.i, e.j]] = e.weight;
            a[[e.j, e.i]] = e.weight;
        }
        a
    }

    /// Combinatorial Laplacian `D - A`.
    pub fn laplacian(&self) -> Array2<f64> {
        let mut l = self.adjacency().mapv(|x| -x);
        for (i, &d) in self.degrees.iter().enumerate() {
            l[[i, i]] = d;
        }
        l
    }

    /// Symmetric normalized Laplacian `D^{-1/2} (D - A) D^{-1/2}`.
    pub fn normalized_laplacian(&self) -> Array2<f64> {
        let inv_sqrt: Vec<f64> = self.degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut l = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            l[[i, i]] = 1.0;
        }
        for e in &self.edges {
            let v = -e.weight * inv_sqrt[e.i] * inv_sqrt[e.j];
            l[[e.i, e.j]] = v;
            l[[e.j, e.i]] = v;
        }
        l
    }

    /// `y = A x` using the sparse adjacency.
    pub fn adjacency_apply(&self, x: &[f64]) -> Vec<f64> {
        self.neighbors
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * x[j]).sum())
            .collect()
    }

    /// Unweighted hop distance from `source` to every vertex.
    pub fn hop_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.neighbors[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &(u, _) in &self.neighbors[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        count
    }

    /// SHA-256 over the vertex count and the canonically ordered edge list.
    /// Two graphs hash equal iff they have the same adjacency matrix.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut canon: Vec<(usize, usize, u64)> = self
            .edges
            .iter()
            .map(|e| (e.i.min(e.j), e.i.max(e.j), e.weight.to_bits()))
            .collect();
        canon.sort_unstable();
        let mut h = Sha256::new();
        h.update(b"sgft-graph-v1");
        h.update((self.n as u64).to_le_bytes());
        for (i, j, w) in canon {
            h.update((i as u64).to_le_bytes());
            h.update((j as u64).to_le_bytes());
            h.update(w.to_le_bytes());
        }
        h.finalize().into()
    }
}

/// Degree-weighted, centered, unit-norm indicator of a vertex subset.
///
/// Entries are `b / vol(S)` on the set and `-b / vol(V \ S)` elsewhere,
/// with `b = sqrt(vol(S) vol(V \ S) / vol(V))`, so that `sᵀD1 = 0` and
/// `sᵀDs = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedVector {
    values: Vec<f64>,
    seed_set: Vec<usize>,
}

impl SeedVector {
    pub fn unit(graph: &Graph, set: &[usize]) -> Result<Self> {
        let mut seed_set = set.to_vec();
        seed_set.sort_unstable();
        seed_set.dedup();
        if seed_set.is_empty() {
            return Err(Error::EmptySeed);
        }
        for &v in &seed_set {
            graph.check_vertex(v)?;
        }
        if seed_set.len() == graph.n() {
            return Err(Error::FullSeed);
        }
        let vol_s = graph.volume(&seed_set)?;
        let vol_v = graph.total_volume();
        let vol_rest = vol_v - vol_s;
        let b = (vol_s * vol_rest / vol_v).sqrt();
        let mut values = vec![-b / vol_rest; graph.n()];
        for &v in &seed_set {
            values[v] = b / vol_s;
        }
        Ok(SeedVector { values, seed_set })
    }

    pub fn singleton(graph: &Graph, vertex: usize) -> Result<Self> {
        Self::unit(graph, &[vertex])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed_set(&self) -> &[usize] {
        &self.seed_set
    }
}

/// Parses the whitespace-separated `i j w` edge-list format. Blank lines and
/// everything after `#` are ignored. The vertex count is one past the
/// largest index mentioned.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let malformed = |reason: String| Error::MalformedRow {
            line: lineno + 1,
            reason,
        };
        if fields.len() != 3 {
            return Err(malformed(format!(
                "expected 3 fields `i j w`, found {}",
                fields.len()
            )));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| malformed(format!("bad vertex index {:?}", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| malformed(format!("bad vertex index {:?}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| malformed(format!("bad weight {:?}", fields[2])))?;
        n = n.max(i + 1).max(j + 1);
        edges.push((i, j, w));
    }
    Graph::new(n, edges)
}

pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# n={}", graph.n())?;
    for e in graph.edges() {
        writeln!(out, "{} {} {}", e.i, e.j, e.weight)?;
    }
    Ok(())
}

#[cfg(test)]
pub(crate) fn ring(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
}

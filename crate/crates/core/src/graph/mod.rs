//! The graphs `Γ(R, k)`: vertices are sums of `k`-element strongly
//! orthogonal subsets, and `u ~ v` exactly when `u - v` is again a vertex.
//!
//! Two representations share the [`Adjacency`] trait:
//!
//! * [`Gamma`] answers adjacency queries through a membership table on the
//!   vertex vectors and never stores edges. Statistics for the largest graphs
//!   are streamed through it block by block.
//! * [`SosGraph`] is the materialized compressed adjacency, built by
//!   [`build_gamma`] and persisted with [`serialize`]/[`deserialize`].

mod build;
mod format;
mod union_find;

use std::borrow::Cow;
use std::ops::Range;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::{orbits_of_set, OrbitPartition, RootError, RootSystem, RootSystemKind, RootVector, MAX_DIM};
use crate::sos::{vertex_set, SosError, VertexSet};

pub use build::{build_gamma, build_gamma_from, BuildOptions, Checkpoint};
pub use format::{deserialize, read_graph, serialize, write_graph, GRAPH_MAGIC};
pub use union_find::UnionFind;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported graph file version {0}")]
    Version(u16),
    #[error("graph file checksum failure: {0}")]
    Checksum(String),
    #[error("malformed graph file: {0}")]
    Format(String),
    #[error("resource budget exceeded: {detail} (checkpoint: {checkpoint:?})")]
    ResourceExhausted {
        detail: String,
        checkpoint: Option<Checkpoint>,
    },
}

/// Read access shared by the implicit and the materialized graph.
pub trait Adjacency: Sync {
    fn order(&self) -> usize;
    /// Vertex vectors in index order (sorted lexicographically).
    fn vectors(&self) -> &[RootVector];
    fn is_adjacent(&self, u: u32, v: u32) -> bool;
    /// Neighbours of `v` in ascending order.
    fn neighbors(&self, v: u32) -> Cow<'_, [u32]>;
}

const HIGH_BITS: u64 = 0x8080_8080_8080_8080;

/// Bytewise wrapping subtraction of two packed coordinate words.
#[inline(always)]
fn sub_packed(a: u64, b: u64) -> u64 {
    ((a | HIGH_BITS).wrapping_sub(b & !HIGH_BITS)) ^ ((a ^ !b) & HIGH_BITS)
}

/// `Γ(R, k)` with adjacency answered by hashing difference vectors.
#[derive(Debug, Clone)]
pub struct Gamma {
    system: RootSystemKind,
    k: usize,
    vectors: Vec<RootVector>,
    raw: Vec<[i8; MAX_DIM]>,
    keys: Vec<u64>,
    norms: Vec<i32>,
    index: FxHashMap<u64, u32>,
    /// `norm_ok[x]` when some vertex has doubled norm `x`; differences with
    /// any other norm cannot be vertices.
    norm_ok: Vec<bool>,
}

impl Gamma {
    pub fn new(vs: VertexSet) -> Self {
        let raw: Vec<[i8; MAX_DIM]> = vs.vectors.iter().map(|v| *v.raw()).collect();
        let keys: Vec<u64> = vs.vectors.iter().map(RootVector::key).collect();
        let norms: Vec<i32> = vs.vectors.iter().map(RootVector::norm2).collect();
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        let max_norm = norms.iter().copied().max().unwrap_or(0) as usize;
        let mut norm_ok = vec![false; max_norm + 1];
        for &n in &norms {
            norm_ok[n as usize] = true;
        }
        Self {
            system: vs.system,
            k: vs.k,
            vectors: vs.vectors,
            raw,
            keys,
            norms,
            index,
            norm_ok,
        }
    }

    pub fn from_system(rs: &RootSystem, k: usize) -> Result<Self, GraphError> {
        Ok(Self::new(vertex_set(rs, k)?))
    }

    pub fn system(&self) -> RootSystemKind {
        self.system
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.system.ambient_dim()
    }

    pub fn index_of(&self, v: &RootVector) -> Option<u32> {
        self.index.get(&v.key()).copied()
    }

    pub fn contains(&self, v: &RootVector) -> bool {
        self.index.contains_key(&v.key())
    }

    /// Number of unordered vertex pairs.
    pub fn pair_count(&self) -> u64 {
        let n = self.vectors.len() as u64;
        n * n.saturating_sub(1) / 2
    }

    #[inline(always)]
    fn adjacent_raw(&self, i: usize, j: usize) -> bool {
        let dot = crate::roots::vector_dot8(&self.raw[i], &self.raw[j]);
        let diff_norm = self.norms[i] + self.norms[j] - 2 * dot;
        if diff_norm <= 0 || !self.norm_ok.get(diff_norm as usize).copied().unwrap_or(false) {
            return false;
        }
        self.index.contains_key(&sub_packed(self.keys[i], self.keys[j]))
    }

    /// Visits every edge `(i, j)` with `i` in `rows`, `j` in `cols` and `i < j`.
    pub fn scan_block(&self, rows: Range<usize>, cols: Range<usize>, mut emit: impl FnMut(u32, u32)) {
        for i in rows {
            let start = cols.start.max(i + 1);
            for j in start..cols.end {
                if self.adjacent_raw(i, j) {
                    emit(i as u32, j as u32);
                }
            }
        }
    }

    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        (0..self.vectors.len()).filter(|&j| self.adjacent_raw(v, j)).count()
    }

    /// Degrees and components by streaming all pairs in `block_size` blocks.
    /// Nothing proportional to the edge count is stored.
    pub fn stream_stats(&self, block_size: usize) -> GraphStats {
        let n = self.vectors.len();
        let block_size = block_size.max(1);
        let blocks: Vec<(usize, usize)> = (0..n.div_ceil(block_size))
            .flat_map(|bi| (bi..n.div_ceil(block_size)).map(move |bj| (bi, bj)))
            .collect();
        let (degrees, mut uf) = blocks
            .par_iter()
            .fold(
                || (vec![0u32; n], UnionFind::new(n)),
                |(mut deg, mut uf), &(bi, bj)| {
                    let rows = bi * block_size..((bi + 1) * block_size).min(n);
                    let cols = bj * block_size..((bj + 1) * block_size).min(n);
                    self.scan_block(rows, cols, |u, v| {
                        deg[u as usize] += 1;
                        deg[v as usize] += 1;
                        uf.union(u, v);
                    });
                    (deg, uf)
                },
            )
            .reduce(
                || (vec![0u32; n], UnionFind::new(n)),
                |(mut da, mut ua), (db, mut ub)| {
                    for (a, b) in da.iter_mut().zip(&db) {
                        *a += b;
                    }
                    for x in 0..n as u32 {
                        let r = ub.find(x);
                        if r != x {
                            ua.union(x, r);
                        }
                    }
                    (da, ua)
                },
            );
        GraphStats::from_parts(&degrees, uf.component_sizes())
    }
}

impl Adjacency for Gamma {
    fn order(&self) -> usize {
        self.vectors.len()
    }

    fn vectors(&self) -> &[RootVector] {
        &self.vectors
    }

    fn is_adjacent(&self, u: u32, v: u32) -> bool {
        self.adjacent_raw(u as usize, v as usize)
    }

    fn neighbors(&self, v: u32) -> Cow<'_, [u32]> {
        let v = v as usize;
        Cow::Owned(
            (0..self.vectors.len())
                .filter(|&j| self.adjacent_raw(v, j))
                .map(|j| j as u32)
                .collect(),
        )
    }
}

/// Materialized `Γ(R, k)` in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SosGraph {
    pub system: RootSystemKind,
    pub k: usize,
    pub dim: usize,
    pub vertices: Vec<RootVector>,
    offsets: Vec<u64>,
    neighbors: Vec<u32>,
}

impl SosGraph {
    /// Assembles the graph from per-vertex sorted neighbour lists in CSR form.
    pub fn from_csr(
        system: RootSystemKind,
        k: usize,
        vertices: Vec<RootVector>,
        offsets: Vec<u64>,
        neighbors: Vec<u32>,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        if offsets.len() != n + 1
            || offsets[0] != 0
            || *offsets.last().unwrap() as usize != neighbors.len()
            || offsets.windows(2).any(|w| w[0] > w[1])
            || neighbors.iter().any(|&x| x as usize >= n)
        {
            return Err(GraphError::Format("inconsistent compressed rows".into()));
        }
        Ok(Self {
            system,
            k,
            dim: system.ambient_dim(),
            vertices,
            offsets,
            neighbors,
        })
    }

    pub fn edge_count(&self) -> u64 {
        self.neighbors.len() as u64 / 2
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    pub fn row(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn raw_neighbors(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertices.len() as u32)
            .flat_map(move |u| self.row(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}

impl Adjacency for SosGraph {
    fn order(&self) -> usize {
        self.vertices.len()
    }

    fn vectors(&self) -> &[RootVector] {
        &self.vertices
    }

    fn is_adjacent(&self, u: u32, v: u32) -> bool {
        self.row(u).binary_search(&v).is_ok()
    }

    fn neighbors(&self, v: u32) -> Cow<'_, [u32]> {
        Cow::Borrowed(self.row(v))
    }
}

/// Basic parameters of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: u64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub is_regular: bool,
    pub component_count: usize,
    /// Largest first.
    pub component_sizes: Vec<usize>,
    pub isolated_vertex_count: usize,
}

impl GraphStats {
    fn from_parts(degrees: &[u32], component_sizes: Vec<usize>) -> Self {
        let min_degree = degrees.iter().copied().min().unwrap_or(0) as usize;
        let max_degree = degrees.iter().copied().max().unwrap_or(0) as usize;
        Self {
            n: degrees.len(),
            m: degrees.iter().map(|&d| u64::from(d)).sum::<u64>() / 2,
            min_degree,
            max_degree,
            is_regular: min_degree == max_degree,
            component_count: component_sizes.len(),
            component_sizes,
            isolated_vertex_count: degrees.iter().filter(|&&d| d == 0).count(),
        }
    }
}

pub fn stats(g: &SosGraph) -> GraphStats {
    let n = g.vertices.len();
    let degrees: Vec<u32> = (0..n as u32).map(|v| g.degree(v) as u32).collect();
    let mut uf = UnionFind::new(n);
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    GraphStats::from_parts(&degrees, uf.component_sizes())
}

/// Weyl orbits on the vertex set, by closure under the simple reflections.
pub fn weyl_orbit_labels<G: Adjacency + ?Sized>(
    rs: &RootSystem,
    g: &G,
) -> Result<OrbitPartition, RootError> {
    orbits_of_set(g.vectors(), &rs.simple_reflections())
}

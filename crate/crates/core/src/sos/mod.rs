//! Strongly orthogonal subsets and the vertex sets built from their sums.

pub(crate) mod format;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::bitset::{self, BitSet};
use crate::roots::{RootSystem, RootSystemKind, RootVector};

pub use format::{read_vertex_set, write_vertex_set, VERTEX_SET_MAGIC};

#[derive(Debug, Error)]
pub enum SosError {
    #[error("subset size must be at least 1")]
    ZeroSize,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed vertex set file: {0}")]
    Format(String),
}

/// Strong-orthogonality relation on the roots of a system, as bitset rows
/// indexed by root position.
#[derive(Debug, Clone)]
pub struct StrongOrthogonalityGraph {
    roots: Vec<RootVector>,
    adj: Vec<BitSet>,
    /// `later[i]` keeps only neighbours with index greater than `i`.
    later: Vec<BitSet>,
}

impl StrongOrthogonalityGraph {
    pub fn order(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[RootVector] {
        &self.roots
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Calls `visit` with the root indices of every `k`-clique, in
    /// lexicographic order, restricted to cliques whose smallest index is `first`.
    fn for_each_clique_from(&self, k: usize, first: usize, visit: &mut impl FnMut(&[usize])) {
        let mut chosen = vec![first];
        if k == 1 {
            visit(&chosen);
            return;
        }
        let words = self.later[first].words().to_vec();
        self.extend(k, &words, &mut chosen, visit);
    }

    fn extend(
        &self,
        k: usize,
        cand: &[u64],
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        let need = k - chosen.len();
        if bitset::count(cand) < need {
            return;
        }
        let mut next = vec![0u64; cand.len()];
        for b in bitset::ones(cand) {
            chosen.push(b);
            if need == 1 {
                visit(chosen);
            } else {
                bitset::and_into(&mut next, cand, self.later[b].words());
                self.extend(k, &next, chosen, visit);
            }
            chosen.pop();
        }
    }
}

/// Roots are vertices; edges join strongly orthogonal pairs.
pub fn strong_orthogonality_graph(rs: &RootSystem) -> StrongOrthogonalityGraph {
    let roots = rs.roots().to_vec();
    let n = roots.len();
    let mut adj = vec![BitSet::new(n); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rs
                .strongly_orthogonal(&roots[i], &roots[j])
                .expect("both are roots")
            {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let later = adj
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut l = BitSet::new(n);
            for j in row.iter().filter(|&j| j > i) {
                l.insert(j);
            }
            l
        })
        .collect();
    StrongOrthogonalityGraph { roots, adj, later }
}

/// A strongly orthogonal subset, members sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SoSet {
    pub members: Vec<RootVector>,
}

impl SoSet {
    pub fn sum(&self) -> RootVector {
        let mut it = self.members.iter().copied();
        let first = it.next().expect("non-empty subset");
        it.fold(first, |acc, r| acc + r)
    }
}

/// Streams every `k`-element strongly orthogonal subset exactly once, in
/// lexicographic order of root indices. Empty when `k` exceeds the maximum
/// subset size (or is zero).
pub fn enumerate_sos(graph: &StrongOrthogonalityGraph, k: usize) -> SosIter<'_> {
    let mut it = SosIter {
        graph,
        k,
        cands: Vec::new(),
        cursor: Vec::new(),
        chosen: Vec::new(),
    };
    if k >= 1 && k <= graph.order() {
        it.cands.push(BitSet::full(graph.order()).words().to_vec());
        it.cursor.push(0);
    }
    it
}

pub struct SosIter<'a> {
    graph: &'a StrongOrthogonalityGraph,
    k: usize,
    cands: Vec<Vec<u64>>,
    cursor: Vec<usize>,
    chosen: Vec<usize>,
}

impl SosIter<'_> {
    fn next_indices(&mut self) -> Option<&[usize]> {
        loop {
            let depth = self.cands.len().checked_sub(1)?;
            let found = bitset::ones(&self.cands[depth]).find(|&b| b >= self.cursor[depth]);
            let Some(b) = found else {
                self.cands.pop();
                self.cursor.pop();
                if depth > 0 {
                    self.chosen.pop();
                }
                continue;
            };
            self.cursor[depth] = b + 1;
            if depth + 1 == self.k {
                self.chosen.push(b);
                // Leave `chosen` one longer than the stack until the next call.
                return Some(&self.chosen);
            }
            let next: Vec<u64> = self.cands[depth]
                .iter()
                .zip(self.graph.later[b].words())
                .map(|(&x, &y)| x & y)
                .collect();
            self.chosen.push(b);
            self.cands.push(next);
            self.cursor.push(0);
        }
    }
}

impl Iterator for SosIter<'_> {
    type Item = SoSet;

    fn next(&mut self) -> Option<SoSet> {
        if self.chosen.len() == self.cands.len() && !self.chosen.is_empty() {
            // Drop the leaf emitted by the previous call.
            self.chosen.pop();
        }
        let roots = &self.graph.roots;
        let idx = self.next_indices()?;
        Some(SoSet {
            members: idx.iter().map(|&i| roots[i]).collect(),
        })
    }
}

/// The deduplicated sums of all `k`-element strongly orthogonal subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub system: RootSystemKind,
    pub k: usize,
    pub dim: usize,
    /// Sorted lexicographically, no duplicates.
    pub vectors: Vec<RootVector>,
    /// Number of subsets summing to each vector; `None` when loaded from a file.
    pub multiplicity: Option<Vec<u64>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Total number of strongly orthogonal subsets, when multiplicities are known.
    pub fn sos_count(&self) -> Option<u64> {
        self.multiplicity.as_ref().map(|m| m.iter().sum())
    }

    pub fn position(&self, v: &RootVector) -> Option<usize> {
        self.vectors.binary_search(v).ok()
    }
}

/// Builds the vertex set of `Γ(rs, k)`. Enumeration is sharded by the
/// smallest root index of each subset; only the sum table is kept in memory.
pub fn vertex_set(rs: &RootSystem, k: usize) -> Result<VertexSet, SosError> {
    let graph = strong_orthogonality_graph(rs);
    vertex_set_from_graph(rs, &graph, k)
}

pub fn vertex_set_from_graph(
    rs: &RootSystem,
    graph: &StrongOrthogonalityGraph,
    k: usize,
) -> Result<VertexSet, SosError> {
    if k == 0 {
        return Err(SosError::ZeroSize);
    }
    let empty = || VertexSet {
        system: rs.kind(),
        k,
        dim: rs.ambient_dim(),
        vectors: Vec::new(),
        multiplicity: Some(Vec::new()),
    };
    if k > rs.max_sos_size() {
        return Ok(empty());
    }
    let roots = graph.roots();
    let merged = (0..graph.order())
        .into_par_iter()
        .map(|first| {
            let mut sums: FxHashMap<RootVector, u64> = FxHashMap::default();
            graph.for_each_clique_from(k, first, &mut |idx| {
                let mut s = roots[idx[0]];
                for &i in &idx[1..] {
                    s = s + roots[i];
                }
                *sums.entry(s).or_default() += 1;
            });
            sums
        })
        .reduce(FxHashMap::default, |a, b| {
            if a.len() >= b.len() {
                merge(a, b)
            } else {
                merge(b, a)
            }
        });
    let mut pairs: Vec<(RootVector, u64)> = merged.into_iter().collect();
    pairs.sort_unstable_by_key(|p| p.0);
    let (vectors, mult) = pairs.into_iter().unzip();
    Ok(VertexSet {
        multiplicity: Some(mult),
        vectors,
        ..empty()
    })
}

fn merge(
    mut a: FxHashMap<RootVector, u64>,
    b: FxHashMap<RootVector, u64>,
) -> FxHashMap<RootVector, u64> {
    for (v, c) in b {
        *a.entry(v).or_default() += c;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::build_root_system;

    fn rs(kind: RootSystemKind) -> RootSystem {
        build_root_system(kind).unwrap()
    }

    fn v(c: &[i32]) -> RootVector {
        RootVector::new(c).unwrap()
    }

    /// Independent oracle: all k-subsets of roots checked pairwise with the
    /// definition, no bitsets or ordering tricks.
    fn brute_force_sos(rs: &RootSystem, k: usize) -> Vec<Vec<RootVector>> {
        fn rec(
            rs: &RootSystem,
            k: usize,
            start: usize,
            cur: &mut Vec<RootVector>,
            out: &mut Vec<Vec<RootVector>>,
        ) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..rs.roots().len() {
                let r = rs.roots()[i];
                if cur.iter().all(|c| rs.strongly_orthogonal(c, &r).unwrap()) {
                    cur.push(r);
                    rec(rs, k, i + 1, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(rs, k, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn g2_relation_is_two_regular() {
        let g = strong_orthogonality_graph(&rs(RootSystemKind::G2));
        assert_eq!(g.order(), 12);
        assert!((0..12).all(|i| g.degree(i) == 2));
    }

    #[test]
    fn e8_strongly_orthogonal_pairs() {
        // brute force over all 240*239/2 pairs: 240 * 126 / 2
        let e8 = rs(RootSystemKind::E8);
        let g = strong_orthogonality_graph(&e8);
        assert_eq!(g.edge_count(), 15_120);
        assert_eq!(brute_force_sos(&e8, 2).len(), 15_120);
        assert_eq!(vertex_set(&e8, 2).unwrap().len(), 2160);
    }

    #[test]
    fn a1_has_no_strongly_orthogonal_pairs() {
        let g = strong_orthogonality_graph(&rs(RootSystemKind::A(1)));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (kind, k) in [
            (RootSystemKind::G2, 2),
            (RootSystemKind::F4, 2),
            (RootSystemKind::F4, 3),
            (RootSystemKind::F4, 4),
            (RootSystemKind::E6, 3),
            (RootSystemKind::D(4), 4),
        ] {
            let sys = rs(kind);
            let g = strong_orthogonality_graph(&sys);
            let fast: Vec<Vec<RootVector>> = enumerate_sos(&g, k).map(|s| s.members).collect();
            assert_eq!(fast, brute_force_sos(&sys, k), "{kind} k={k}");
        }
    }

    #[test]
    fn g2_pairs_collapse_to_six_sums() {
        let g2 = rs(RootSystemKind::G2);
        let g = strong_orthogonality_graph(&g2);
        assert_eq!(enumerate_sos(&g, 2).count(), 12);
        let vs = vertex_set(&g2, 2).unwrap();
        assert_eq!(vs.len(), 6);
        assert_eq!(vs.sos_count(), Some(12));
    }

    #[test]
    fn e6_has_no_five_element_subset() {
        let e6 = rs(RootSystemKind::E6);
        let g = strong_orthogonality_graph(&e6);
        assert_eq!(enumerate_sos(&g, 5).count(), 0);
        assert!(vertex_set(&e6, 5).unwrap().is_empty());
    }

    #[test]
    fn f4_contains_the_paired_subset() {
        let f4 = rs(RootSystemKind::F4);
        let g = strong_orthogonality_graph(&f4);
        let mut target = vec![
            v(&[2, 2, 0, 0]),
            v(&[2, -2, 0, 0]),
            v(&[0, 0, 2, 2]),
            v(&[0, 0, 2, -2]),
        ];
        target.sort();
        assert!(enumerate_sos(&g, 4).any(|s| s.members == target));
    }

    #[test]
    fn k1_vertices_are_the_roots() {
        for kind in RootSystemKind::EXCEPTIONAL {
            let sys = rs(kind);
            assert_eq!(vertex_set(&sys, 1).unwrap().vectors, sys.roots());
        }
    }

    #[test]
    fn f4_k4_vertices_are_doubled_d4_roots() {
        let vs = vertex_set(&rs(RootSystemKind::F4), 4).unwrap();
        assert_eq!(vs.len(), 24);
        for x in &vs.vectors {
            let nz: Vec<i8> = x.coords().iter().copied().filter(|&c| c != 0).collect();
            assert_eq!(nz.len(), 2);
            assert!(nz.iter().all(|&c| c.abs() == 4), "{x}");
        }
    }

    #[test]
    fn simply_laced_vertices_share_a_norm() {
        for kind in [RootSystemKind::E6, RootSystemKind::E7] {
            let sys = rs(kind);
            for k in 1..=sys.max_sos_size() {
                let vs = vertex_set(&sys, k).unwrap();
                assert!(vs.vectors.iter().all(|x| x.norm2() == 8 * k as i32), "{kind} {k}");
            }
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(matches!(vertex_set(&rs(RootSystemKind::G2), 0), Err(SosError::ZeroSize)));
        let g = strong_orthogonality_graph(&rs(RootSystemKind::G2));
        assert_eq!(enumerate_sos(&g, 0).count(), 0);
    }

    #[test]
    fn reflections_biject_subsets() {
        let f4 = rs(RootSystemKind::F4);
        let g = strong_orthogonality_graph(&f4);
        let sets: Vec<SoSet> = enumerate_sos(&g, 3).collect();
        let lookup: std::collections::HashSet<&SoSet> = sets.iter().collect();
        for s in f4.simple_reflections() {
            let mut images: Vec<SoSet> = sets
                .iter()
                .map(|set| {
                    let mut m: Vec<_> = set.members.iter().map(|r| s.apply(r).unwrap()).collect();
                    m.sort();
                    SoSet { members: m }
                })
                .collect();
            assert!(images.iter().all(|i| lookup.contains(i)));
            images.sort();
            images.dedup();
            assert_eq!(images.len(), sets.len());
        }
    }
}

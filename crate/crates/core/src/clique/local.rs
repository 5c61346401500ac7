use rayon::prelude::*;

use crate::bitset::{self, words_for};
use crate::graph::Adjacency;

/// Induced subgraph on a vertex subset, with bitset rows.
///
/// Local index `i` stands for global vertex `verts[i]`; local order follows
/// the order of `verts`.
#[derive(Debug, Clone)]
pub struct LocalGraph {
    verts: Vec<u32>,
    words: usize,
    adj: Vec<u64>,
}

impl LocalGraph {
    pub fn induced<G: Adjacency + ?Sized>(g: &G, verts: &[u32]) -> Self {
        let n = verts.len();
        let words = words_for(n);
        let rows: Vec<Vec<u64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words];
                for j in 0..n {
                    if j != i && g.is_adjacent(verts[i], verts[j]) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        Self {
            verts: verts.to_vec(),
            words,
            adj: rows.concat(),
        }
    }

    /// Builds from an explicit edge list on `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let words = words_for(n);
        let mut adj = vec![0u64; n * words];
        for &(u, v) in edges {
            if u != v {
                adj[u * words + v / 64] |= 1 << (v % 64);
                adj[v * words + u / 64] |= 1 << (u % 64);
            }
        }
        Self {
            verts: (0..n as u32).collect(),
            words,
            adj,
        }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Global vertex ids in local order.
    pub fn verts(&self) -> &[u32] {
        &self.verts
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        bitset::count(self.row(i))
    }

    fn all(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.words];
        for i in 0..self.len() {
            s[i / 64] |= 1 << (i % 64);
        }
        s
    }

    /// Size of a largest clique (0 for the empty graph).
    pub fn clique_number(&self) -> usize {
        let mut best = 0;
        self.expand(self.all(), 0, &mut best);
        best
    }

    /// The clique number if it exceeds `lower`, otherwise `lower`.
    pub fn clique_number_above(&self, lower: usize) -> usize {
        let mut best = lower;
        self.expand(self.all(), 0, &mut best);
        best
    }

    /// Greedy sequential colouring of `cands`; vertices come out grouped by
    /// colour, with non-decreasing colour numbers.
    fn colour_sort(&self, cands: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = cands.to_vec();
        let mut q = vec![0u64; self.words];
        let (mut order, mut colours) = (Vec::new(), Vec::new());
        let mut colour = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            colour += 1;
            q.copy_from_slice(&uncoloured);
            while let Some(v) = bitset::ones(&q).next() {
                q[v / 64] &= !(1 << (v % 64));
                uncoloured[v / 64] &= !(1 << (v % 64));
                for (w, &a) in q.iter_mut().zip(self.row(v)) {
                    *w &= !a;
                }
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&self, mut cands: Vec<u64>, size: usize, best: &mut usize) {
        let (order, colours) = self.colour_sort(&cands);
        let mut next = vec![0u64; self.words];
        for idx in (0..order.len()).rev() {
            if size + colours[idx] <= *best {
                return;
            }
            let v = order[idx];
            bitset::and_into(&mut next, &cands, self.row(v));
            if next.iter().all(|&w| w == 0) {
                *best = (*best).max(size + 1);
            } else {
                self.expand(next.clone(), size + 1, best);
            }
            cands[v / 64] &= !(1 << (v % 64));
        }
    }

    /// Number of `t`-cliques; `t = 0` counts the empty clique.
    pub fn count_cliques(&self, t: usize) -> u64 {
        if t == 0 {
            return 1;
        }
        let all = self.all();
        (0..self.len())
            .into_par_iter()
            .map(|u| {
                let mut cands = all.clone();
                // Restrict to later vertices so each clique is counted once.
                for (w, word) in cands.iter_mut().enumerate() {
                    if (w + 1) * 64 <= u + 1 {
                        *word = 0;
                    } else if w * 64 <= u {
                        *word &= !((2u64 << (u % 64)) - 1);
                    }
                }
                for (c, &a) in cands.iter_mut().zip(self.row(u)) {
                    *c &= a;
                }
                self.count_in(&mut cands, t - 1)
            })
            .sum()
    }

    /// Counts `t`-cliques inside `cands`; consumes `cands`.
    fn count_in(&self, cands: &mut [u64], t: usize) -> u64 {
        if t == 0 {
            return 1;
        }
        let avail = bitset::count(cands);
        if avail < t {
            return 0;
        }
        if t == 1 {
            return avail as u64;
        }
        let mut total = 0;
        let mut next = vec![0u64; self.words];
        let mut remaining = avail;
        while remaining >= t {
            let u = bitset::ones(cands).next().expect("remaining > 0");
            cands[u / 64] &= !(1 << (u % 64));
            remaining -= 1;
            if t == 2 {
                total += bitset::and_count(cands, self.row(u)) as u64;
            } else {
                bitset::and_into(&mut next, cands, self.row(u));
                total += self.count_in(&mut next.clone(), t - 1);
            }
        }
        total
    }

    /// Counts `t`-cliques whose folded state is accepted. `step` extends a
    /// prefix state by one local vertex and may reject the prefix outright,
    /// which prunes every clique containing it.
    pub fn count_cliques_with<S: Copy + Send + Sync>(
        &self,
        t: usize,
        init: S,
        step: &(dyn Fn(S, usize) -> Option<S> + Sync),
        accept: &(dyn Fn(S) -> bool + Sync),
    ) -> u64 {
        if t == 0 {
            return u64::from(accept(init));
        }
        (0..self.len())
            .into_par_iter()
            .map(|u| {
                let Some(state) = step(init, u) else { return 0 };
                let mut cands = self.row(u).to_vec();
                for (w, word) in cands.iter_mut().enumerate() {
                    if (w + 1) * 64 <= u + 1 {
                        *word = 0;
                    } else if w * 64 <= u {
                        *word &= !((2u64 << (u % 64)) - 1);
                    }
                }
                self.count_with_in(cands, t - 1, state, step, accept)
            })
            .sum()
    }

    fn count_with_in<S: Copy>(
        &self,
        mut cands: Vec<u64>,
        t: usize,
        state: S,
        step: &(dyn Fn(S, usize) -> Option<S> + Sync),
        accept: &(dyn Fn(S) -> bool + Sync),
    ) -> u64 {
        if t == 0 {
            return u64::from(accept(state));
        }
        let mut total = 0;
        let mut remaining = bitset::count(&cands);
        let mut next = vec![0u64; self.words];
        while remaining >= t {
            let u = bitset::ones(&cands).next().expect("remaining > 0");
            cands[u / 64] &= !(1 << (u % 64));
            remaining -= 1;
            if let Some(s) = step(state, u) {
                bitset::and_into(&mut next, &cands, self.row(u));
                total += self.count_with_in(next.clone(), t - 1, s, step, accept);
            }
        }
        total
    }

    /// Visits every `t`-clique as an ascending list of local indices, in
    /// lexicographic order.
    pub fn for_each_clique(&self, t: usize, visit: &mut dyn FnMut(&[usize])) {
        let mut chosen = Vec::with_capacity(t);
        self.cliques_in(self.all(), t, &mut chosen, visit);
    }

    fn cliques_in(&self, mut cands: Vec<u64>, t: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if t == 0 {
            visit(chosen);
            return;
        }
        let mut next = vec![0u64; self.words];
        let mut remaining = bitset::count(&cands);
        while remaining >= t {
            let u = bitset::ones(&cands).next().expect("remaining > 0");
            cands[u / 64] &= !(1 << (u % 64));
            remaining -= 1;
            bitset::and_into(&mut next, &cands, self.row(u));
            chosen.push(u);
            self.cliques_in(next.clone(), t - 1, chosen, visit);
            chosen.pop();
        }
    }

    /// Visits every maximal clique (ascending local indices). The empty
    /// graph has one maximal clique, the empty set.
    pub fn for_each_maximal_clique(&self, visit: &mut dyn FnMut(&[usize])) {
        let mut r = Vec::new();
        let mut sorted = Vec::new();
        self.bron_kerbosch(&mut r, self.all(), vec![0u64; self.words], &mut |r: &[usize]| {
            sorted.clear();
            sorted.extend_from_slice(r);
            sorted.sort_unstable();
            visit(&sorted);
        });
    }

    /// Number of maximal cliques of each size; index = size.
    pub fn maximal_clique_sizes(&self) -> Vec<u64> {
        let mut counts = Vec::new();
        let mut r = Vec::new();
        self.bron_kerbosch(&mut r, self.all(), vec![0u64; self.words], &mut |r: &[usize]| {
            if counts.len() <= r.len() {
                counts.resize(r.len() + 1, 0);
            }
            counts[r.len()] += 1;
        });
        counts
    }

    /// Bron–Kerbosch with Tomita pivoting.
    fn bron_kerbosch(&self, r: &mut Vec<usize>, mut p: Vec<u64>, mut x: Vec<u64>, visit: &mut dyn FnMut(&[usize])) {
        if p.iter().chain(&x).all(|&w| w == 0) {
            visit(r);
            return;
        }
        let pivot = bitset::ones(&p)
            .chain(bitset::ones(&x))
            .max_by_key(|&u| (bitset::and_count(&p, self.row(u)), std::cmp::Reverse(u)))
            .expect("p or x non-empty");
        let branch: Vec<usize> = bitset::ones(&p).filter(|&v| !self.is_adjacent(pivot, v)).collect();
        let mut np = vec![0u64; self.words];
        let mut nx = vec![0u64; self.words];
        for v in branch {
            bitset::and_into(&mut np, &p, self.row(v));
            bitset::and_into(&mut nx, &x, self.row(v));
            r.push(v);
            self.bron_kerbosch(r, np.clone(), nx.clone(), visit);
            r.pop();
            p[v / 64] &= !(1 << (v % 64));
            x[v / 64] |= 1 << (v % 64);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every subset, checked pairwise.
    fn subsets_oracle(n: usize, edges: &[(usize, usize)]) -> (Vec<u64>, Vec<u64>) {
        let adj = |a: usize, b: usize| edges.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a));
        let is_clique = |s: u32| {
            (0..n).all(|a| (0..n).all(|b| a >= b || s >> a & 1 == 0 || s >> b & 1 == 0 || adj(a, b)))
        };
        let mut by_size = vec![0u64; n + 1];
        let mut maximal = vec![0u64; n + 1];
        for s in 0u32..(1 << n) {
            if !is_clique(s) {
                continue;
            }
            by_size[s.count_ones() as usize] += 1;
            if (0..n).all(|v| s >> v & 1 == 1 || !is_clique(s | 1 << v)) {
                maximal[s.count_ones() as usize] += 1;
            }
        }
        (by_size, maximal)
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..12).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
            let len = pairs.len();
            (Just(n), proptest::collection::vec(any::<bool>(), len)).prop_map(move |(n, keep)| {
                let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e).collect();
                (n, edges)
            })
        })
    }

    proptest! {
        #[test]
        fn counts_match_subset_enumeration((n, edges) in random_graph()) {
            let g = LocalGraph::from_edges(n, &edges);
            let (by_size, maximal) = subsets_oracle(n, &edges);
            let omega = by_size.iter().rposition(|&c| c > 0).unwrap();
            prop_assert_eq!(g.clique_number(), omega);
            for (t, &c) in by_size.iter().enumerate() {
                prop_assert_eq!(g.count_cliques(t), c);
                prop_assert_eq!(g.count_cliques_with(t, (), &|s, _| Some(s), &|_| true), c);
                // Pruning every clique through vertex 0 leaves the cliques of G - 0.
                let avoiding = g.count_cliques_with(t, (), &|s, u| (u != 0).then_some(s), &|_| true);
                let mut without: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| a != 0 && b != 0).collect();
                without.push((0, 0));
                let expect = LocalGraph::from_edges(n, &without).count_cliques(t) - u64::from(t == 1);
                prop_assert_eq!(avoiding, expect);
                let mut seen = Vec::new();
                g.for_each_clique(t, &mut |c| seen.push(c.to_vec()));
                prop_assert_eq!(seen.len() as u64, c);
                prop_assert!(seen.windows(2).all(|w| w[0] < w[1]));
            }
            let mut sizes = g.maximal_clique_sizes();
            sizes.resize(n + 1, 0);
            prop_assert_eq!(sizes, maximal);
        }
    }

    #[test]
    fn wide_graph_crosses_word_boundaries() {
        // Complete graph on 130 vertices minus a perfect matching.
        let n = 130;
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !(a % 2 == 0 && b == a + 1))
            .collect();
        let g = LocalGraph::from_edges(n, &edges);
        assert_eq!(g.clique_number(), 65);
        // Each removed edge lies in 128 triangles, and no triangle holds two.
        assert_eq!(g.count_cliques(3), 130 * 129 * 128 / 6 - 65 * 128);
        assert_eq!(g.count_cliques(2), edges.len() as u64);
    }
}

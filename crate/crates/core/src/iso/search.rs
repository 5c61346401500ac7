//! Isomorphism search for small graphs: colour refinement, then
//! individualization with backtracking.

use std::collections::BTreeMap;

use crate::bitset::{words_for, BitSet};

/// Dense graph used by the search.
#[derive(Debug, Clone)]
pub(crate) struct Dense {
    pub nbrs: Vec<Vec<u32>>,
    rows: Vec<BitSet>,
}

impl Dense {
    pub fn new(nbrs: Vec<Vec<u32>>) -> Self {
        let n = nbrs.len();
        let rows = nbrs
            .iter()
            .map(|ns| {
                let mut b = BitSet::new(n);
                ns.iter().for_each(|&u| b.insert(u as usize));
                b
            })
            .collect();
        Self { nbrs, rows }
    }

    pub fn order(&self) -> usize {
        self.nbrs.len()
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.rows[u as usize].contains(v as usize)
    }

    pub fn edge_count(&self) -> usize {
        self.nbrs.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn triangles_at(&self, v: usize) -> u64 {
        let row = self.rows[v].words();
        self.nbrs[v]
            .iter()
            .map(|&u| crate::bitset::and_count(row, self.rows[u as usize].words()) as u64)
            .sum::<u64>()
            / 2
    }
}

/// Refines two colourings together until stable, with colour ids shared
/// between the graphs. Returns `false` as soon as the colour class sizes
/// differ.
fn refine(a: &Dense, b: &Dense, ca: &mut Vec<u32>, cb: &mut Vec<u32>) -> bool {
    let mut current = {
        let mut s: Vec<u32> = ca.iter().chain(cb.iter()).copied().collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    loop {
        let sig = |g: &Dense, c: &[u32], v: usize| {
            let mut ns: Vec<u32> = g.nbrs[v].iter().map(|&u| c[u as usize]).collect();
            ns.sort_unstable();
            (c[v], ns)
        };
        let sa: Vec<(u32, Vec<u32>)> = (0..a.order()).map(|v| sig(a, ca, v)).collect();
        let sb: Vec<(u32, Vec<u32>)> = (0..b.order()).map(|v| sig(b, cb, v)).collect();
        let mut ids: BTreeMap<&(u32, Vec<u32>), u32> = BTreeMap::new();
        for s in sa.iter().chain(&sb) {
            ids.entry(s).or_insert(0);
        }
        for (i, id) in ids.values_mut().enumerate() {
            *id = i as u32;
        }
        let na: Vec<u32> = sa.iter().map(|s| ids[s]).collect();
        let nb: Vec<u32> = sb.iter().map(|s| ids[s]).collect();
        if histogram(&na) != histogram(&nb) {
            return false;
        }
        let next = ids.len();
        *ca = na;
        *cb = nb;
        if next == current {
            return true;
        }
        current = next;
    }
}

fn histogram(c: &[u32]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &x in c {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

pub(crate) struct Search<'a> {
    a: &'a Dense,
    b: &'a Dense,
    /// Stop at the first isomorphism found.
    first_only: bool,
    pub found: Option<Vec<u32>>,
    pub count: u64,
}

impl<'a> Search<'a> {
    pub fn new(a: &'a Dense, b: &'a Dense, first_only: bool) -> Self {
        Self {
            a,
            b,
            first_only,
            found: None,
            count: 0,
        }
    }

    /// Runs the search from invariant-based initial colours.
    pub fn run(&mut self) {
        let (a, b) = (self.a, self.b);
        if a.order() != b.order() || a.edge_count() != b.edge_count() {
            return;
        }
        let invariant = |g: &Dense, v: usize| (g.nbrs[v].len() as u64, g.triangles_at(v));
        let mut keys: Vec<(u64, u64)> = (0..a.order())
            .map(|v| invariant(a, v))
            .chain((0..b.order()).map(|v| invariant(b, v)))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let colour = |g: &Dense| -> Vec<u32> {
            (0..g.order())
                .map(|v| keys.binary_search(&invariant(g, v)).unwrap() as u32)
                .collect()
        };
        let (mut ca, mut cb) = (colour(a), colour(b));
        if refine(a, b, &mut ca, &mut cb) {
            self.descend(ca, cb);
        }
    }

    fn done(&self) -> bool {
        self.first_only && self.found.is_some()
    }

    fn descend(&mut self, ca: Vec<u32>, cb: Vec<u32>) {
        // Target cell: smallest non-singleton colour class, lowest colour first.
        let h = histogram(&ca);
        let Some((&cell, _)) = h.iter().filter(|(_, &s)| s > 1).min_by_key(|(&c, &s)| (s, c)) else {
            self.leaf(&ca, &cb);
            return;
        };
        let fresh = ca.iter().chain(&cb).copied().max().unwrap_or(0) + 1;
        let v = ca.iter().position(|&c| c == cell).expect("cell non-empty");
        for w in (0..cb.len()).filter(|&w| cb[w] == cell) {
            let (mut na, mut nb) = (ca.clone(), cb.clone());
            na[v] = fresh;
            nb[w] = fresh;
            if refine(self.a, self.b, &mut na, &mut nb) {
                self.descend(na, nb);
            }
            if self.done() {
                return;
            }
        }
    }

    fn leaf(&mut self, ca: &[u32], cb: &[u32]) {
        let mut by_colour = vec![u32::MAX; ca.iter().chain(cb).copied().max().map_or(0, |m| m as usize + 1)];
        for (w, &c) in cb.iter().enumerate() {
            by_colour[c as usize] = w as u32;
        }
        let map: Vec<u32> = ca.iter().map(|&c| by_colour[c as usize]).collect();
        if is_isomorphism(self.a, self.b, &map) {
            self.count += 1;
            if self.found.is_none() {
                self.found = Some(map);
            }
        }
    }
}

/// Whether `map` is a bijection carrying edges onto edges and non-edges onto
/// non-edges.
pub(crate) fn is_isomorphism(a: &Dense, b: &Dense, map: &[u32]) -> bool {
    let n = a.order();
    if map.len() != n || b.order() != n || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut hit = vec![0u64; words_for(n)];
    for &x in map {
        if x as usize >= n || hit[x as usize / 64] >> (x % 64) & 1 == 1 {
            return false;
        }
        hit[x as usize / 64] |= 1 << (x % 64);
    }
    // Equal edge counts plus edge preservation under a bijection imply
    // non-edges are preserved too.
    (0..n).all(|u| a.nbrs[u].iter().all(|&v| b.adjacent(map[u], map[v as usize])))
}

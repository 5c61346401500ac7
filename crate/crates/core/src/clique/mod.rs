//! Clique numbers and maximum-clique counts.
//!
//! Maximum cliques through a vertex `v` are in bijection with the
//! `(ω − 1)`-cliques of the induced neighbourhood `Γ[N(v)]`. Because every
//! automorphism preserves these counts, one representative per orbit is
//! enough: with orbit sizes `nᵢ` and per-vertex counts `cᵢ`, the number of
//! maximum cliques is `Σ nᵢ cᵢ / ω`.

mod local;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Adjacency;
use crate::roots::OrbitPartition;

pub use local::LocalGraph;

/// Default vertex bound for [`brute_force_maximum_cliques`].
pub const BRUTE_FORCE_BOUND: usize = 750;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliqueError {
    #[error("graph has {n} vertices, above the brute-force bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("weighted sum {sum} is not divisible by {divisor}")]
    NotDivisible { sum: u128, divisor: u64 },
    #[error("orbit partition covers {partition} vertices but the graph has {order}")]
    PartitionMismatch { partition: usize, order: usize },
}

/// Per-orbit data of a census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCount {
    pub representative: u32,
    pub orbit_size: u64,
    /// Cliques of the counted kind through one vertex of the orbit.
    pub per_vertex: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCensus {
    pub omega: usize,
    pub per_orbit: Vec<OrbitCount>,
    pub total_maximum_cliques: u64,
}

/// `Σ nᵢ cᵢ / divisor`, insisting on exact division.
pub fn weighted_total(per_orbit: &[OrbitCount], divisor: usize) -> Result<u64, CliqueError> {
    let sum: u128 = per_orbit
        .iter()
        .map(|o| u128::from(o.orbit_size) * u128::from(o.per_vertex))
        .sum();
    let divisor = divisor as u64;
    if divisor == 0 || sum % u128::from(divisor) != 0 {
        return Err(CliqueError::NotDivisible { sum, divisor });
    }
    Ok((sum / u128::from(divisor)) as u64)
}

/// `Γ[N(v)]`, with local order = ascending vertex index.
pub fn neighbourhood<G: Adjacency + ?Sized>(g: &G, v: u32) -> LocalGraph {
    LocalGraph::induced(g, &g.neighbors(v))
}

/// Vertices in degeneracy order (repeatedly remove a vertex of minimum
/// remaining degree, lowest index first), with each vertex's neighbours.
fn degeneracy_order<G: Adjacency + ?Sized>(g: &G) -> (Vec<u32>, Vec<Vec<u32>>) {
    let n = g.order();
    let nbrs: Vec<Vec<u32>> = (0..n as u32).into_par_iter().map(|v| g.neighbors(v).into_owned()).collect();
    let mut degree: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, u32)>> =
        (0..n as u32).map(|v| std::cmp::Reverse((degree[v as usize], v))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
        if removed[v as usize] || d != degree[v as usize] {
            continue;
        }
        removed[v as usize] = true;
        order.push(v);
        for &u in &nbrs[v as usize] {
            if !removed[u as usize] {
                degree[u as usize] -= 1;
                heap.push(std::cmp::Reverse((degree[u as usize], u)));
            }
        }
    }
    (order, nbrs)
}

/// Exact clique number by branch and bound over degeneracy-ordered forward
/// neighbourhoods. Needs every neighbour list, so for the largest implicit
/// graphs prefer [`clique_number_by_orbits`].
pub fn clique_number<G: Adjacency + ?Sized>(g: &G) -> usize {
    let n = g.order();
    if n == 0 {
        return 0;
    }
    let (order, nbrs) = degeneracy_order(g);
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }
    let mut best = 1;
    for &v in &order {
        let forward: Vec<u32> = nbrs[v as usize]
            .iter()
            .copied()
            .filter(|&u| position[u as usize] > position[v as usize])
            .collect();
        if forward.len() < best {
            continue;
        }
        let local = LocalGraph::induced(g, &forward);
        best = best.max(1 + local.clique_number_above(best - 1));
    }
    best
}

/// Clique number from one neighbourhood per orbit of an automorphism group.
pub fn clique_number_by_orbits<G: Adjacency + ?Sized>(g: &G, orbits: &OrbitPartition) -> usize {
    orbits
        .representatives()
        .map(|r| 1 + neighbourhood(g, r).clique_number())
        .max()
        .unwrap_or(0)
}

/// Number of `t`-cliques in the subgraph induced by `subset`.
pub fn count_cliques_of_size<G: Adjacency + ?Sized>(g: &G, subset: &[u32], t: usize) -> u64 {
    LocalGraph::induced(g, subset).count_cliques(t)
}

/// Visits each clique of size `omega` containing `v` once, as an ascending
/// vertex list, in lexicographic order.
pub fn for_each_max_clique_through<G: Adjacency + ?Sized>(
    g: &G,
    v: u32,
    omega: usize,
    visit: &mut dyn FnMut(&[u32]),
) {
    let local = neighbourhood(g, v);
    let mut clique = Vec::with_capacity(omega);
    local.for_each_clique(omega.saturating_sub(1), &mut |c| {
        clique.clear();
        clique.extend(c.iter().map(|&i| local.verts()[i]));
        let at = clique.partition_point(|&u| u < v);
        clique.insert(at, v);
        visit(&clique);
    });
}

pub fn enumerate_max_cliques_through<G: Adjacency + ?Sized>(g: &G, v: u32, omega: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_max_clique_through(g, v, omega, &mut |c| out.push(c.to_vec()));
    out
}

/// Visits each inclusion-maximal clique containing `v` (ascending lists).
pub fn for_each_maximal_clique_through<G: Adjacency + ?Sized>(g: &G, v: u32, visit: &mut dyn FnMut(&[u32])) {
    let local = neighbourhood(g, v);
    let mut clique = Vec::new();
    local.for_each_maximal_clique(&mut |c| {
        clique.clear();
        clique.extend(c.iter().map(|&i| local.verts()[i]));
        let at = clique.partition_point(|&u| u < v);
        clique.insert(at, v);
        visit(&clique);
    });
}

fn check_partition<G: Adjacency + ?Sized>(g: &G, orbits: &OrbitPartition) -> Result<(), CliqueError> {
    if orbits.orbit_of.len() != g.order() {
        return Err(CliqueError::PartitionMismatch {
            partition: orbits.orbit_of.len(),
            order: g.order(),
        });
    }
    Ok(())
}

/// Clique number and number of maximum cliques. `orbits` must be the orbits
/// of a group acting by automorphisms (for example the Weyl group).
pub fn count_maximum_cliques<G: Adjacency + ?Sized>(
    g: &G,
    orbits: &OrbitPartition,
) -> Result<CliqueCensus, CliqueError> {
    check_partition(g, orbits)?;
    let reps: Vec<(u32, usize)> = orbits.orbits.iter().map(|o| (o[0], o.len())).collect();
    let locals: Vec<LocalGraph> = reps.iter().map(|&(r, _)| neighbourhood(g, r)).collect();
    let omega = locals.iter().map(|l| 1 + l.clique_number()).max().unwrap_or(0);
    let per_orbit: Vec<OrbitCount> = reps
        .iter()
        .zip(&locals)
        .map(|(&(representative, size), local)| OrbitCount {
            representative,
            orbit_size: size as u64,
            per_vertex: local.count_cliques(omega - 1),
        })
        .collect();
    let total_maximum_cliques = if omega == 0 { 0 } else { weighted_total(&per_orbit, omega)? };
    Ok(CliqueCensus {
        omega,
        per_orbit,
        total_maximum_cliques,
    })
}

/// Number of inclusion-maximal cliques of each size, as `(size, count)`
/// pairs in increasing size. Orbit-weighted like [`count_maximum_cliques`].
pub fn maximal_clique_size_counts<G: Adjacency + ?Sized>(
    g: &G,
    orbits: &OrbitPartition,
) -> Result<Vec<(usize, u64)>, CliqueError> {
    check_partition(g, orbits)?;
    let per_rep: Vec<(u64, Vec<u64>)> = orbits
        .orbits
        .par_iter()
        .map(|o| (o.len() as u64, neighbourhood(g, o[0]).maximal_clique_sizes()))
        .collect();
    let max_local = per_rep.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let mut out = Vec::new();
    for local_size in 0..max_local {
        let per_orbit: Vec<OrbitCount> = orbits
            .orbits
            .iter()
            .zip(&per_rep)
            .map(|(o, (n, sizes))| OrbitCount {
                representative: o[0],
                orbit_size: *n,
                per_vertex: sizes.get(local_size).copied().unwrap_or(0),
            })
            .collect();
        let size = local_size + 1;
        let total = weighted_total(&per_orbit, size)?;
        if total > 0 {
            out.push((size, total));
        }
    }
    Ok(out)
}

/// Every maximal clique of the whole graph, by Bron–Kerbosch on the full
/// adjacency. Only for graphs of at most `bound` vertices.
pub fn brute_force_maximal_cliques<G: Adjacency + ?Sized>(g: &G, bound: usize) -> Result<Vec<Vec<u32>>, CliqueError> {
    let n = g.order();
    if n > bound {
        return Err(CliqueError::TooLarge { n, bound });
    }
    let all: Vec<u32> = (0..n as u32).collect();
    let local = LocalGraph::induced(g, &all);
    let mut out = Vec::new();
    local.for_each_maximal_clique(&mut |c| {
        if !c.is_empty() {
            out.push(c.iter().map(|&i| i as u32).collect());
        }
    });
    out.sort_unstable();
    Ok(out)
}

/// All maximum cliques, found without neighbourhoods or orbits; an oracle
/// for the census on small graphs.
pub fn brute_force_maximum_cliques<G: Adjacency + ?Sized>(g: &G, bound: usize) -> Result<Vec<Vec<u32>>, CliqueError> {
    let maximal = brute_force_maximal_cliques(g, bound)?;
    let omega = maximal.iter().map(Vec::len).max().unwrap_or(0);
    Ok(maximal.into_iter().filter(|c| c.len() == omega).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_gamma, weyl_orbit_labels, BuildOptions, Gamma};
    use crate::roots::{build_root_system, RootSystemKind};

    fn census(kind: RootSystemKind, k: usize) -> (Gamma, CliqueCensus) {
        let rs = build_root_system(kind).unwrap();
        let g = Gamma::from_system(&rs, k).unwrap();
        let orbits = weyl_orbit_labels(&rs, &g).unwrap();
        let c = count_maximum_cliques(&g, &orbits).unwrap();
        (g, c)
    }

    #[test]
    fn orbit_census_matches_brute_force_on_small_graphs() {
        use RootSystemKind::*;
        for (kind, k) in [(G2, 1), (G2, 2), (F4, 1), (F4, 2), (F4, 3), (F4, 4), (E6, 1), (E6, 4)] {
            let (g, c) = census(kind, k);
            let brute = brute_force_maximum_cliques(&g, BRUTE_FORCE_BOUND).unwrap();
            assert_eq!(c.total_maximum_cliques, brute.len() as u64, "{kind} {k}");
            assert_eq!(c.omega, brute[0].len());
            assert_eq!(c.omega, clique_number(&g), "{kind} {k}");
        }
    }

    #[test]
    fn clique_count_is_constant_on_weyl_orbits() {
        let rs = build_root_system(RootSystemKind::F4).unwrap();
        let g = Gamma::from_system(&rs, 1).unwrap();
        let orbits = weyl_orbit_labels(&rs, &g).unwrap();
        for o in &orbits.orbits {
            let counts: Vec<usize> = o.iter().map(|&v| enumerate_max_cliques_through(&g, v, 7).len()).collect();
            assert!(counts.iter().all(|&c| c == counts[0]), "{counts:?}");
        }
    }

    #[test]
    fn cliques_through_vertex_are_lexicographic_and_contain_it() {
        let rs = build_root_system(RootSystemKind::F4).unwrap();
        let g = build_gamma(&rs, 4, &BuildOptions::default()).unwrap();
        for v in 0..24 {
            let cl = enumerate_max_cliques_through(&g, v, 3);
            assert_eq!(cl.len(), 12);
            assert!(cl.iter().all(|c| c.binary_search(&v).is_ok() && c.windows(2).all(|w| w[0] < w[1])));
            assert!(cl.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn edgeless_graph_has_singleton_cliques() {
        let (g, c) = census(RootSystemKind::E7, 7);
        assert_eq!(c.omega, 1);
        assert_eq!(c.total_maximum_cliques, 576);
        assert_eq!(enumerate_max_cliques_through(&g, 5, 1), vec![vec![5]]);
    }

    #[test]
    fn e6_k2_per_vertex_count() {
        let (g, c) = census(RootSystemKind::E6, 2);
        assert_eq!(c.omega, 3);
        assert_eq!(c.per_orbit.len(), 1);
        assert_eq!(c.per_orbit[0].per_vertex, 48);
        let nbrs = g.neighbors(0).into_owned();
        assert_eq!(count_cliques_of_size(&g, &nbrs, 2), 48);
        assert_eq!(count_cliques_of_size(&g, &nbrs, 1), nbrs.len() as u64);
    }

    fn maximal_sizes_both_ways(kind: RootSystemKind, k: usize) -> Vec<(usize, u64)> {
        let rs = build_root_system(kind).unwrap();
        let g = Gamma::from_system(&rs, k).unwrap();
        let orbits = weyl_orbit_labels(&rs, &g).unwrap();
        let by_orbit = maximal_clique_size_counts(&g, &orbits).unwrap();
        let brute = brute_force_maximal_cliques(&g, BRUTE_FORCE_BOUND).unwrap();
        let mut direct = std::collections::BTreeMap::new();
        for c in &brute {
            *direct.entry(c.len()).or_insert(0u64) += 1;
        }
        assert_eq!(by_orbit, direct.into_iter().collect::<Vec<_>>(), "{kind} k={k}");
        by_orbit
    }

    #[test]
    fn maximal_clique_sizes_match_brute_force() {
        assert!(maximal_sizes_both_ways(RootSystemKind::F4, 1).contains(&(5, 336)));
        // Not every maximal clique of Γ(E8, 1) is maximum.
        assert_eq!(maximal_sizes_both_ways(RootSystemKind::E8, 1), vec![(7, 69120), (8, 17280)]);
    }

    #[test]
    fn brute_force_refuses_large_graphs() {
        let rs = build_root_system(RootSystemKind::E7).unwrap();
        let g = Gamma::from_system(&rs, 2).unwrap();
        assert_eq!(
            brute_force_maximum_cliques(&g, BRUTE_FORCE_BOUND),
            Err(CliqueError::TooLarge { n: 756, bound: 750 })
        );
    }

    #[test]
    fn single_edge() {
        let g = LocalGraph::from_edges(2, &[(0, 1)]);
        assert_eq!(g.count_cliques(2), 1);
        assert_eq!(g.clique_number(), 2);
    }

    #[test]
    fn divisibility_is_enforced() {
        let per_orbit = [OrbitCount {
            representative: 0,
            orbit_size: 5,
            per_vertex: 3,
        }];
        assert_eq!(weighted_total(&per_orbit, 3), Ok(5));
        assert_eq!(
            weighted_total(&per_orbit, 2),
            Err(CliqueError::NotDivisible { sum: 15, divisor: 2 })
        );
    }
}

//! Checks of structural identities: scaling between vertex sets, the norm
//! congruence at the largest SOS size, regularity of `Γ(R, 1)`, Weyl reflections acting
//! as automorphisms, and isomorphism of small graphs.

mod search;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Adjacency, Gamma, GraphError};
use crate::roots::{RootError, RootSystem, RootVector};
use crate::sos::vertex_set;
use search::{is_isomorphism, Dense, Search};

/// Above this many pairs the pairwise checks sample instead.
pub const EXHAUSTIVE_PAIR_LIMIT: u64 = 10_000_000;
pub const DEFAULT_SAMPLE_PAIRS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5EED_2024;
/// Vertex bound for the isomorphism search.
pub const ISOMORPHISM_BOUND: usize = 5000;
/// Automorphism checks are exhaustive up to this many vertices.
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 1000;

#[derive(Debug, Error)]
pub enum IsoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("graph has {n} vertices, above the bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("{0} is not simply laced")]
    NotSimplyLaced(String),
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub detail: String,
    /// Pairs (or vertices, for vertex-level checks) examined.
    pub checked: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

/// Whether `V(R, k_large) = 2 · V(R, k_small)`.
pub fn check_scaling_isomorphism(rs: &RootSystem, k_small: usize, k_large: usize) -> Result<CheckReport, IsoError> {
    let small = vertex_set(rs, k_small).map_err(GraphError::from)?;
    let large = vertex_set(rs, k_large).map_err(GraphError::from)?;
    let mut doubled: Vec<RootVector> = small
        .vectors
        .iter()
        .map(|v| v.checked_scale(2).ok_or(RootError::CoordinateOverflow))
        .collect::<Result<_, _>>()?;
    doubled.sort_unstable();
    let passed = doubled == large.vectors;
    Ok(CheckReport {
        check: format!("V({}, {k_large}) = 2 V({}, {k_small})", rs.kind(), rs.kind()),
        passed,
        detail: format!("{} vs {} vertices", small.len(), large.len()),
        checked: large.len() as u64,
        exhaustive: true,
        seed: None,
    })
}

/// Pairs `(i, j)` of `0..n`: all ordered pairs when few enough, otherwise a
/// seeded uniform sample.
fn pairs(n: usize, sample: u64, seed: u64) -> (Vec<(u32, u32)>, bool) {
    let total = (n as u64) * (n as u64);
    if total <= EXHAUSTIVE_PAIR_LIMIT {
        let all = (0..n as u32).flat_map(|i| (0..n as u32).map(move |j| (i, j))).collect();
        return (all, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn = (0..sample)
        .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
        .collect();
    (drawn, false)
}

/// Doubled `‖v − w‖²` is divisible by 32 (true norm divisible by 8) for all
/// vertex pairs of `Γ(R, k)`, checked exhaustively or on a sample.
pub fn check_mod8(rs: &RootSystem, k: usize, sample: u64, seed: u64) -> Result<CheckReport, IsoError> {
    if !rs.is_simply_laced() {
        return Err(IsoError::NotSimplyLaced(rs.label()));
    }
    let vs = vertex_set(rs, k).map_err(GraphError::from)?;
    let (pairs, exhaustive) = pairs(vs.len(), sample, seed);
    let bad = pairs
        .par_iter()
        .filter(|&&(i, j)| {
            let (v, w) = (&vs.vectors[i as usize], &vs.vectors[j as usize]);
            (v.norm2() + w.norm2() - 2 * v.dot(w)) % 32 != 0
        })
        .count();
    Ok(CheckReport {
        check: format!("norm congruence mod 8 on V({}, {k})", rs.kind()),
        passed: bad == 0 && !vs.is_empty(),
        detail: format!("{bad} violating pairs among {} vertices", vs.len()),
        checked: pairs.len() as u64,
        exhaustive,
        seed: (!exhaustive).then_some(seed),
    })
}

/// `Γ(R, 1)` is regular of degree `2(h − 2)`.
pub fn check_degree_formula(rs: &RootSystem) -> Result<CheckReport, IsoError> {
    if !rs.is_simply_laced() {
        return Err(IsoError::NotSimplyLaced(rs.label()));
    }
    let g = Gamma::from_system(rs, 1)?;
    let expected = 2 * (rs.coxeter_number() - 2);
    let s = g.stream_stats(4096);
    Ok(CheckReport {
        check: format!("Gamma({}, 1) regular of degree 2(h - 2)", rs.kind()),
        passed: s.is_regular && s.min_degree == expected,
        detail: format!("degrees {}..{}, expected {expected}", s.min_degree, s.max_degree),
        checked: s.n as u64,
        exhaustive: true,
        seed: None,
    })
}

/// Vertex permutation induced by a linear map, if the map permutes the
/// vertex set.
fn induced_permutation<G: Adjacency + ?Sized>(
    g: &G,
    f: impl Fn(&RootVector) -> Result<RootVector, RootError>,
) -> Result<Option<Vec<u32>>, RootError> {
    let index: FxHashMap<u64, u32> = g
        .vectors()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.key(), i as u32))
        .collect();
    let mut perm = Vec::with_capacity(g.order());
    let mut hit = vec![false; g.order()];
    for v in g.vectors() {
        match index.get(&f(v)?.key()) {
            Some(&j) if !std::mem::replace(&mut hit[j as usize], true) => perm.push(j),
            _ => return Ok(None),
        }
    }
    Ok(Some(perm))
}

/// Every simple reflection permutes the vertices and preserves adjacency
/// and non-adjacency: on all pairs up to [`EXHAUSTIVE_VERTEX_LIMIT`]
/// vertices, otherwise on `sample` seeded pairs per reflection.
pub fn check_weyl_automorphism<G: Adjacency + ?Sized>(
    g: &G,
    rs: &RootSystem,
    sample: u64,
    seed: u64,
) -> Result<CheckReport, IsoError> {
    let n = g.order();
    let exhaustive = n <= EXHAUSTIVE_VERTEX_LIMIT;
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for (t, s) in rs.simple_reflections().iter().enumerate() {
        let Some(perm) = induced_permutation(g, |v| s.apply(v))? else {
            failures.push(format!("reflection {t} does not permute the vertices"));
            continue;
        };
        let pairs: Vec<(u32, u32)> = if exhaustive {
            (0..n as u32).flat_map(|i| (i + 1..n as u32).map(move |j| (i, j))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            (0..sample)
                .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
                .collect()
        };
        checked += pairs.len() as u64;
        let bad = pairs
            .par_iter()
            .filter(|&&(u, v)| u != v && g.is_adjacent(u, v) != g.is_adjacent(perm[u as usize], perm[v as usize]))
            .count();
        if bad > 0 {
            failures.push(format!("reflection {t} breaks {bad} pairs"));
        }
    }
    Ok(CheckReport {
        check: "simple reflections act as automorphisms".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} reflections on {n} vertices", rs.rank())
        } else {
            failures.join("; ")
        },
        checked,
        exhaustive,
        seed: (!exhaustive).then_some(seed),
    })
}

fn dense<G: Adjacency + ?Sized>(g: &G, bound: usize) -> Result<Dense, IsoError> {
    if g.order() > bound {
        return Err(IsoError::TooLarge { n: g.order(), bound });
    }
    Ok(Dense::new((0..g.order() as u32).map(|v| g.neighbors(v).into_owned()).collect()))
}

/// An isomorphism `g1 → g2` as the image of each vertex, or `None`. Graphs
/// above `bound` vertices are refused.
pub fn find_isomorphism<A: Adjacency + ?Sized, B: Adjacency + ?Sized>(
    g1: &A,
    g2: &B,
    bound: usize,
) -> Result<Option<Vec<u32>>, IsoError> {
    let (a, b) = (dense(g1, bound)?, dense(g2, bound)?);
    let mut search = Search::new(&a, &b, true);
    search.run();
    Ok(search.found)
}

/// Decides isomorphism and independently re-verifies a found bijection on
/// every pair.
pub fn check_graph_isomorphism_small<A: Adjacency + ?Sized, B: Adjacency + ?Sized>(
    g1: &A,
    g2: &B,
    bound: usize,
) -> Result<(CheckReport, Option<Vec<u32>>), IsoError> {
    let map = find_isomorphism(g1, g2, bound)?;
    let verified = map.as_ref().is_some_and(|m| {
        let n = g1.order() as u32;
        (0..n).all(|u| (u + 1..n).all(|v| g1.is_adjacent(u, v) == g2.is_adjacent(m[u as usize], m[v as usize])))
    });
    let report = CheckReport {
        check: "graph isomorphism".into(),
        passed: verified,
        detail: format!(
            "{} and {} vertices; {}",
            g1.order(),
            g2.order(),
            if verified { "bijection verified on all pairs" } else { "no isomorphism" }
        ),
        checked: (g1.order() as u64).pow(2),
        exhaustive: true,
        seed: None,
    };
    Ok((report, map))
}

/// Order of the automorphism group, counting every leaf of the search.
pub fn automorphism_group_order<G: Adjacency + ?Sized>(g: &G, bound: usize) -> Result<u64, IsoError> {
    let a = dense(g, bound)?;
    let mut search = Search::new(&a, &a, false);
    search.run();
    Ok(search.count)
}

/// Whether `map` is an isomorphism `g1 → g2`.
pub fn verify_isomorphism<A: Adjacency + ?Sized, B: Adjacency + ?Sized>(g1: &A, g2: &B, map: &[u32]) -> bool {
    match (dense(g1, usize::MAX), dense(g2, usize::MAX)) {
        (Ok(a), Ok(b)) => is_isomorphism(&a, &b, map),
        _ => false,
    }
}

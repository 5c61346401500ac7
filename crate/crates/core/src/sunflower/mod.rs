//! Support-based sunflower classification of cliques.
//!
//! A family of vectors is a sunflower when all pairwise intersections of
//! their coordinate supports are one common, non-empty set, the core. In the
//! matrix of the family, core columns are non-zero in every row and every
//! other column is non-zero in at most one row.
//!
//! Coordinate permutations preserve supports up to relabelling columns, so
//! the number of sunflower cliques through a vertex is constant on orbits of
//! the coordinate permutations that lie in the Weyl group.

mod basis;

use std::collections::VecDeque;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clique::{
    for_each_max_clique_through, for_each_maximal_clique_through, neighbourhood, weighted_total, CliqueError, OrbitCount,
};
use crate::graph::Adjacency;
use crate::roots::{orbits_of_set, OrbitPartition, RootError, RootSystem, RootSystemKind, RootVector, VectorAction, MAX_DIM};

pub use basis::{rational_support, rebase_vertices, BasisChange, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SunflowerError {
    #[error("a sunflower needs at least two vectors, got {0}")]
    TooFew(usize),
    #[error("vectors of different dimensions")]
    DimensionMismatch,
    #[error("permutation {perm:?} does not preserve the roots of {system}")]
    NotAnAutomorphism { system: RootSystemKind, perm: Vec<u8> },
    #[error("invalid basis change: {0}")]
    Basis(String),
    #[error(transparent)]
    Clique(#[from] CliqueError),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SunflowerVerdict {
    pub is_sunflower: bool,
    /// Columns non-zero in every vector.
    pub core: Vec<usize>,
    /// Number of vectors non-zero in each column.
    pub column_profile: Vec<usize>,
}

/// Verdict from support masks over `dim` columns.
pub fn verdict_from_supports(masks: &[u64], dim: usize) -> Result<SunflowerVerdict, SunflowerError> {
    let p = masks.len();
    if p < 2 {
        return Err(SunflowerError::TooFew(p));
    }
    let column_profile: Vec<usize> = (0..dim)
        .map(|c| masks.iter().filter(|&&m| m >> c & 1 == 1).count())
        .collect();
    let core: Vec<usize> = (0..dim).filter(|&c| column_profile[c] == p).collect();
    let is_sunflower = !core.is_empty() && column_profile.iter().all(|&x| x <= 1 || x == p);
    Ok(SunflowerVerdict {
        is_sunflower,
        core,
        column_profile,
    })
}

pub fn is_sunflower(vectors: &[RootVector]) -> Result<SunflowerVerdict, SunflowerError> {
    let dim = vectors.first().map_or(0, RootVector::dim);
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(SunflowerError::DimensionMismatch);
    }
    let masks: Vec<u64> = vectors.iter().map(RootVector::support_mask).collect();
    verdict_from_supports(&masks, dim)
}

/// Fast path of [`verdict_from_supports`]: columns hit at least twice must
/// be hit by every mask, and some column must be.
#[inline]
pub fn supports_form_sunflower(masks: impl IntoIterator<Item = u64>) -> bool {
    let (mut once, mut twice, mut all) = (0u64, 0u64, u64::MAX);
    for m in masks {
        twice |= once & m;
        once |= m;
        all &= m;
    }
    all != 0 && twice == all
}

/// A permutation of coordinates: coordinate `i` moves to `image[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordPermutation {
    image: [u8; MAX_DIM],
    dim: u8,
}

impl CoordPermutation {
    pub fn new(image: &[u8]) -> Option<Self> {
        let dim = image.len();
        if dim > MAX_DIM {
            return None;
        }
        let mut seen = [false; MAX_DIM];
        for &x in image {
            if x as usize >= dim || std::mem::replace(&mut seen[x as usize], true) {
                return None;
            }
        }
        let mut full = [0u8; MAX_DIM];
        for (i, f) in full.iter_mut().enumerate() {
            *f = image.get(i).copied().unwrap_or(i as u8);
        }
        Some(Self { image: full, dim: dim as u8 })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(&(0..dim as u8).collect::<Vec<_>>()).expect("identity is a permutation")
    }

    /// Swaps two coordinates.
    pub fn transposition(dim: usize, a: usize, b: usize) -> Self {
        let mut image: Vec<u8> = (0..dim as u8).collect();
        image.swap(a, b);
        Self::new(&image).expect("transposition is a permutation")
    }

    /// Cycles `coords[0] → coords[1] → … → coords[0]`.
    pub fn cycle(dim: usize, coords: &[usize]) -> Self {
        let mut image: Vec<u8> = (0..dim as u8).collect();
        for (i, &c) in coords.iter().enumerate() {
            image[c] = coords[(i + 1) % coords.len()] as u8;
        }
        Self::new(&image).expect("cycle is a permutation")
    }

    pub fn image(&self) -> &[u8] {
        &self.image[..self.dim as usize]
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut image = self.image;
        for (slot, &o) in image.iter_mut().zip(&other.image).take(self.dim as usize) {
            *slot = self.image[o as usize];
        }
        Self { image, dim: self.dim }
    }

    pub fn apply(&self, v: &RootVector) -> RootVector {
        v.permuted(&self.image)
    }
}

impl VectorAction for CoordPermutation {
    fn act(&self, v: &RootVector) -> Result<RootVector, RootError> {
        Ok(self.apply(v))
    }
}

/// A group of coordinate permutations, given by generators.
#[derive(Debug, Clone)]
pub struct PermGroup {
    pub dim: usize,
    pub generators: Vec<CoordPermutation>,
}

impl PermGroup {
    pub fn trivial(dim: usize) -> Self {
        Self { dim, generators: Vec::new() }
    }

    /// The symmetric group on `coords`.
    fn symmetric_on(dim: usize, coords: &[usize]) -> Vec<CoordPermutation> {
        if coords.len() < 2 {
            return Vec::new();
        }
        vec![
            CoordPermutation::transposition(dim, coords[0], coords[1]),
            CoordPermutation::cycle(dim, coords),
        ]
    }

    /// Group order, by closing the generators under composition.
    pub fn order(&self) -> usize {
        let id = CoordPermutation::identity(self.dim);
        let mut seen = FxHashSet::default();
        seen.insert(id);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g.compose(&p);
                if seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen.len()
    }

    pub fn orbits(&self, vectors: &[RootVector]) -> Result<OrbitPartition, RootError> {
        orbits_of_set(vectors, &self.generators)
    }
}

/// The coordinate permutations lying in the Weyl group, in the default
/// coordinates: the full symmetric group for `E8`, `F4` and `G2`; for `E7`
/// the swap of the first and last coordinates together with all
/// permutations of the middle six; for `E6` all permutations of coordinates
/// 1 to 5 (0-based). Each generator is checked to preserve the roots.
pub fn permutation_subgroup(rs: &RootSystem) -> Result<PermGroup, SunflowerError> {
    let dim = rs.ambient_dim();
    let generators = match rs.kind() {
        RootSystemKind::E8 | RootSystemKind::F4 | RootSystemKind::G2 => {
            PermGroup::symmetric_on(dim, &(0..dim).collect::<Vec<_>>())
        }
        RootSystemKind::E7 => {
            let mut g = vec![CoordPermutation::transposition(dim, 0, 7)];
            g.extend(PermGroup::symmetric_on(dim, &[1, 2, 3, 4, 5, 6]));
            g
        }
        RootSystemKind::E6 => PermGroup::symmetric_on(dim, &[1, 2, 3, 4, 5]),
        RootSystemKind::A(_) | RootSystemKind::D(_) => PermGroup::symmetric_on(dim, &(0..dim).collect::<Vec<_>>()),
    };
    for g in &generators {
        if !rs.roots().iter().all(|r| rs.is_root(&g.apply(r))) {
            return Err(SunflowerError::NotAnAutomorphism {
                system: rs.kind(),
                perm: g.image().to_vec(),
            });
        }
    }
    Ok(PermGroup { dim, generators })
}

/// Sunflower counts over a class of cliques.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SunflowerCensus {
    /// Size of the cliques examined.
    pub clique_size: usize,
    /// Per permutation orbit, sunflower cliques through the representative.
    pub per_orbit: Vec<OrbitCount>,
    pub total_sunflowers: u64,
}

fn census_by_orbits<G: Adjacency + ?Sized>(
    g: &G,
    orbits: &OrbitPartition,
    clique_size: usize,
    per_rep: impl Fn(u32, &[u64]) -> u64 + Sync,
) -> Result<SunflowerCensus, SunflowerError> {
    let masks: Vec<u64> = g.vectors().iter().map(RootVector::support_mask).collect();
    let per_orbit: Vec<OrbitCount> = orbits
        .orbits
        .par_iter()
        .map(|o| OrbitCount {
            representative: o[0],
            orbit_size: o.len() as u64,
            per_vertex: per_rep(o[0], &masks),
        })
        .collect();
    let total_sunflowers = weighted_total(&per_orbit, clique_size)?;
    Ok(SunflowerCensus {
        clique_size,
        per_orbit,
        total_sunflowers,
    })
}

/// Number of maximum cliques (size `omega ≥ 2`) that are sunflowers.
pub fn count_sunflower_max_cliques<G: Adjacency + ?Sized>(
    g: &G,
    rs: &RootSystem,
    omega: usize,
) -> Result<SunflowerCensus, SunflowerError> {
    let orbits = permutation_subgroup(rs)?.orbits(g.vectors())?;
    count_sunflower_max_cliques_with(g, &orbits, omega)
}

/// As [`count_sunflower_max_cliques`], with orbits of any group of
/// coordinate permutations acting by automorphisms.
pub fn count_sunflower_max_cliques_with<G: Adjacency + ?Sized>(
    g: &G,
    orbits: &OrbitPartition,
    omega: usize,
) -> Result<SunflowerCensus, SunflowerError> {
    if omega < 2 {
        return Err(SunflowerError::TooFew(omega));
    }
    census_by_orbits(g, orbits, omega, |v, masks| {
        let local = neighbourhood(g, v);
        let m = masks[v as usize];
        // State: columns hit once or more, twice or more, and by every vector.
        // A column hit twice but missing from the intersection can never
        // recover, so such prefixes are pruned.
        local.count_cliques_with(
            omega - 1,
            (m, 0u64, m),
            &|(once, twice, all), u| {
                let m = masks[local.verts()[u] as usize];
                let (once, twice, all) = (once | m, twice | (once & m), all & m);
                (all != 0 && twice & !all == 0).then_some((once, twice, all))
            },
            &|(_, twice, all)| all != 0 && twice == all,
        )
    })
}

/// Number of inclusion-maximal cliques of exactly `size` vertices that are
/// sunflowers.
pub fn count_sunflower_maximal_cliques<G: Adjacency + ?Sized>(
    g: &G,
    rs: &RootSystem,
    size: usize,
) -> Result<SunflowerCensus, SunflowerError> {
    if size < 2 {
        return Err(SunflowerError::TooFew(size));
    }
    let orbits = permutation_subgroup(rs)?.orbits(g.vectors())?;
    census_by_orbits(g, &orbits, size, |v, masks| {
        let mut count = 0;
        for_each_maximal_clique_through(g, v, &mut |c| {
            if c.len() == size {
                count += u64::from(supports_form_sunflower(c.iter().map(|&u| masks[u as usize])));
            }
        });
        count
    })
}

/// Counts sunflowers among all maximum cliques directly, visiting each
/// clique once through its smallest vertex, with supports taken from
/// `support` (one mask per vertex). Works for any coordinates.
pub fn count_sunflowers_direct<G: Adjacency + ?Sized>(g: &G, omega: usize, support: &[u64]) -> u64 {
    (0..g.order() as u32)
        .into_par_iter()
        .map(|v| {
            let mut count = 0;
            for_each_max_clique_through(g, v, omega, &mut |c| {
                if c[0] == v && supports_form_sunflower(c.iter().map(|&u| support[u as usize])) {
                    count += 1;
                }
            });
            count
        })
        .sum()
}

/// Sunflower count of the maximum cliques after a change of basis.
pub fn count_sunflowers_in_basis<G: Adjacency + ?Sized>(
    g: &G,
    rs: &RootSystem,
    omega: usize,
    basis: &BasisChange,
) -> Result<u64, SunflowerError> {
    basis.check_for(rs)?;
    let support: Vec<u64> = rebase_vertices(g.vectors(), basis)
        .iter()
        .map(|v| rational_support(v))
        .collect();
    Ok(count_sunflowers_direct(g, omega, &support))
}

/// `100 · part / whole` rounded half up to one decimal, as text.
pub fn percentage(part: u64, whole: u64) -> String {
    if whole == 0 {
        return "-".into();
    }
    let tenths = (u128::from(part) * 2000 + u128::from(whole)) / (2 * u128::from(whole));
    format!("{}.{}", tenths / 10, tenths % 10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::{brute_force_maximal_cliques, count_maximum_cliques};
    use crate::graph::{weyl_orbit_labels, Gamma};
    use crate::roots::{build_root_system, ReflectionMap};
    use proptest::prelude::*;

    fn v(c: &[i32]) -> RootVector {
        RootVector::new(c).unwrap()
    }

    /// The definition: all pairwise support intersections equal one
    /// non-empty set.
    fn pairwise(masks: &[u64]) -> bool {
        let core = masks[0] & masks[1];
        core != 0
            && (0..masks.len()).all(|i| (0..masks.len()).all(|j| i == j || masks[i] & masks[j] == core))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn column_rule_matches_pairwise_definition(masks in proptest::collection::vec(0u64..256, 2..7)) {
            let verdict = verdict_from_supports(&masks, 8).unwrap();
            prop_assert_eq!(verdict.is_sunflower, pairwise(&masks));
            prop_assert_eq!(supports_form_sunflower(masks.iter().copied()), verdict.is_sunflower);
        }
    }

    #[test]
    fn f4_star_clique_is_a_sunflower() {
        let c = [v(&[4, 4, 0, 0]), v(&[4, 0, 4, 0]), v(&[4, 0, 0, 4])];
        let verdict = is_sunflower(&c).unwrap();
        assert!(verdict.is_sunflower);
        assert_eq!(verdict.core, vec![0]);
        assert_eq!(verdict.column_profile, vec![3, 1, 1, 1]);
    }

    #[test]
    fn equal_supports_make_a_two_petal_free_sunflower() {
        let verdict = is_sunflower(&[v(&[2, 2, 0]), v(&[2, -2, 0])]).unwrap();
        assert!(verdict.is_sunflower);
        assert_eq!(verdict.core, vec![0, 1]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(is_sunflower(&[v(&[2, 0])]), Err(SunflowerError::TooFew(1)));
        assert_eq!(
            is_sunflower(&[v(&[2, 0]), v(&[2, 0, 0])]),
            Err(SunflowerError::DimensionMismatch)
        );
        assert!(!is_sunflower(&[v(&[2, 0]), v(&[0, 2])]).unwrap().is_sunflower);
    }

    #[test]
    fn group_orders() {
        let expect = [
            (RootSystemKind::E8, 40320),
            (RootSystemKind::E7, 1440),
            (RootSystemKind::E6, 120),
            (RootSystemKind::F4, 24),
            (RootSystemKind::G2, 6),
        ];
        for (kind, order) in expect {
            let rs = build_root_system(kind).unwrap();
            assert_eq!(permutation_subgroup(&rs).unwrap().order(), order, "{kind}");
        }
    }

    #[test]
    fn e7_has_seven_orbits_on_roots() {
        let rs = build_root_system(RootSystemKind::E7).unwrap();
        let g = Gamma::from_system(&rs, 1).unwrap();
        assert_eq!(permutation_subgroup(&rs).unwrap().orbits(g.vectors()).unwrap().len(), 7);
        let trivial = PermGroup::trivial(8).orbits(g.vectors()).unwrap();
        assert_eq!(trivial.len(), 126);
    }

    #[test]
    fn non_weyl_permutation_is_rejected() {
        // Swapping the first coordinate with a middle one leaves the
        // hyperplane orthogonal to e1 + e8.
        let rs = build_root_system(RootSystemKind::E7).unwrap();
        let bad = CoordPermutation::transposition(8, 0, 1);
        assert!(!rs.roots().iter().all(|r| rs.is_root(&bad.apply(r))));
    }

    #[test]
    fn orbit_count_matches_direct_count() {
        use RootSystemKind::*;
        for (kind, k) in [(G2, 2), (F4, 2), (F4, 3), (F4, 4), (E6, 1), (E6, 2), (E6, 3), (E8, 1)] {
            let rs = build_root_system(kind).unwrap();
            let g = Gamma::from_system(&rs, k).unwrap();
            let census = count_maximum_cliques(&g, &weyl_orbit_labels(&rs, &g).unwrap()).unwrap();
            let by_orbit = count_sunflower_max_cliques(&g, &rs, census.omega).unwrap();
            let masks: Vec<u64> = g.vectors().iter().map(RootVector::support_mask).collect();
            assert_eq!(
                by_orbit.total_sunflowers,
                count_sunflowers_direct(&g, census.omega, &masks),
                "{kind} {k}"
            );
        }
    }

    #[test]
    fn sunflower_count_is_constant_on_permutation_orbits() {
        let rs = build_root_system(RootSystemKind::E7).unwrap();
        let g = Gamma::from_system(&rs, 3).unwrap();
        let orbits = permutation_subgroup(&rs).unwrap().orbits(g.vectors()).unwrap();
        let masks: Vec<u64> = g.vectors().iter().map(RootVector::support_mask).collect();
        let sf = |v: u32| {
            let mut n = 0;
            for_each_max_clique_through(&g, v, 5, &mut |c| {
                n += u64::from(supports_form_sunflower(c.iter().map(|&u| masks[u as usize])))
            });
            n
        };
        for o in orbits.orbits.iter().filter(|o| o.len() > 1).take(6) {
            assert_eq!(sf(o[0]), sf(*o.last().unwrap()));
        }
    }

    #[test]
    fn permutations_preserve_verdicts() {
        let rs = build_root_system(RootSystemKind::E8).unwrap();
        let g = Gamma::from_system(&rs, 1).unwrap();
        let group = permutation_subgroup(&rs).unwrap();
        for c in brute_force_maximal_cliques(&g, 750).unwrap().iter().step_by(97) {
            let vecs: Vec<RootVector> = c.iter().map(|&i| g.vectors()[i as usize]).collect();
            let before = is_sunflower(&vecs).unwrap().is_sunflower;
            for p in &group.generators {
                let moved: Vec<RootVector> = vecs.iter().map(|x| p.apply(x)).collect();
                assert_eq!(is_sunflower(&moved).unwrap().is_sunflower, before);
            }
        }
    }

    #[test]
    fn some_reflection_breaks_a_sunflower() {
        let rs = build_root_system(RootSystemKind::E8).unwrap();
        let g = Gamma::from_system(&rs, 1).unwrap();
        let cliques = brute_force_maximal_cliques(&g, 750).unwrap();
        let found = cliques.iter().any(|c| {
            let vecs: Vec<RootVector> = c.iter().map(|&i| g.vectors()[i as usize]).collect();
            is_sunflower(&vecs).unwrap().is_sunflower
                && rs.roots().iter().any(|r| {
                    let s = ReflectionMap::new(*r);
                    let image: Vec<RootVector> = vecs.iter().map(|x| s.apply(x).unwrap()).collect();
                    !is_sunflower(&image).unwrap().is_sunflower
                })
        });
        assert!(found);
    }

    #[test]
    fn identity_basis_keeps_counts() {
        let rs = build_root_system(RootSystemKind::E6).unwrap();
        let g = Gamma::from_system(&rs, 1).unwrap();
        let n = count_sunflowers_in_basis(&g, &rs, 5, &BasisChange::identity(8)).unwrap();
        assert_eq!(n, count_sunflower_max_cliques(&g, &rs, 5).unwrap().total_sunflowers);
    }

    #[test]
    fn percentages_round_to_one_decimal() {
        assert_eq!(percentage(128, 17280), "0.7");
        assert_eq!(percentage(104448, 1021824), "10.2");
        assert_eq!(percentage(6, 6), "100.0");
        assert_eq!(percentage(0, 4320), "0.0");
        assert_eq!(percentage(1, 8), "12.5");
        assert_eq!(percentage(1, 0), "-");
    }
}

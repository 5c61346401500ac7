//! Exceptional and small classical root systems in exact doubled coordinates.
//!
//! `E7` and `E6` live inside the 8-dimensional `E8` embedding as the roots
//! orthogonal to `e1+e8` (and additionally `e1+e7`). `G2` sits on the
//! hyperplane `x1+x2+x3 = 0` of 3-space. Coordinates are doubled throughout,
//! see [`RootVector`].

mod orbit;
mod reflection;
mod vector;

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use orbit::{orbit_closure, orbits_of_set, OrbitPartition, VectorAction};
pub use reflection::ReflectionMap;
pub use vector::{inner_product, RootVector, MAX_DIM};
pub(crate) use vector::dot8 as vector_dot8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("unknown root system label {0:?}")]
    UnknownLabel(String),
    #[error("rank {rank} out of range for type {family}")]
    RankOutOfRange { family: char, rank: usize },
    #[error("dimension {0} outside 1..=8")]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("coordinate overflow")]
    CoordinateOverflow,
    #[error("{0} is not a root of the system")]
    NotARoot(RootVector),
    #[error("reflection image of {0} is not integral in doubled coordinates")]
    NonIntegralImage(RootVector),
    #[error("vector {0} left the set under the group action")]
    NotClosed(RootVector),
    #[error("construction check failed: {0}")]
    Inconsistent(String),
}

/// Which root system to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootSystemKind {
    G2,
    F4,
    E6,
    E7,
    E8,
    A(usize),
    D(usize),
}

impl RootSystemKind {
    pub const EXCEPTIONAL: [RootSystemKind; 5] = [
        RootSystemKind::G2,
        RootSystemKind::F4,
        RootSystemKind::E6,
        RootSystemKind::E7,
        RootSystemKind::E8,
    ];

    pub fn rank(self) -> usize {
        match self {
            Self::G2 => 2,
            Self::F4 => 4,
            Self::E6 => 6,
            Self::E7 => 7,
            Self::E8 => 8,
            Self::A(l) | Self::D(l) => l,
        }
    }

    pub fn coxeter_number(self) -> usize {
        match self {
            Self::G2 => 6,
            Self::F4 | Self::E6 => 12,
            Self::E7 => 18,
            Self::E8 => 30,
            Self::A(l) => l + 1,
            Self::D(l) => 2 * l - 2,
        }
    }

    pub fn max_sos_size(self) -> usize {
        match self {
            Self::G2 => 2,
            Self::F4 | Self::E6 => 4,
            Self::E7 => 7,
            Self::E8 => 8,
            Self::A(l) => l.div_ceil(2),
            Self::D(l) => 2 * (l / 2),
        }
    }

    pub fn ambient_dim(self) -> usize {
        match self {
            Self::G2 => 3,
            Self::F4 => 4,
            Self::E6 | Self::E7 | Self::E8 => 8,
            Self::A(l) => l + 1,
            Self::D(l) => l,
        }
    }

    pub fn is_simply_laced(self) -> bool {
        !matches!(self, Self::G2 | Self::F4)
    }

    fn validate(self) -> Result<(), RootError> {
        match self {
            Self::A(l) if !(1..MAX_DIM).contains(&l) => {
                Err(RootError::RankOutOfRange { family: 'A', rank: l })
            }
            Self::D(l) if !(4..=MAX_DIM).contains(&l) => {
                Err(RootError::RankOutOfRange { family: 'D', rank: l })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RootSystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::G2 => f.write_str("G2"),
            Self::F4 => f.write_str("F4"),
            Self::E6 => f.write_str("E6"),
            Self::E7 => f.write_str("E7"),
            Self::E8 => f.write_str("E8"),
            Self::A(l) => write!(f, "A{l}"),
            Self::D(l) => write!(f, "D{l}"),
        }
    }
}

impl FromStr for RootSystemKind {
    type Err = RootError;

    /// Accepts `G2`, `F4`, `E6`, `E7`, `E8`, `A3`, `A(3)`, `D4`, `D(4)` in any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        let kind = match upper.as_str() {
            "G2" => Self::G2,
            "F4" => Self::F4,
            "E6" => Self::E6,
            "E7" => Self::E7,
            "E8" => Self::E8,
            _ => {
                let mut chars = upper.chars();
                let family = chars.next();
                let rest: String = chars.filter(|c| !matches!(c, '(' | ')')).collect();
                let rank: usize = rest
                    .parse()
                    .map_err(|_| RootError::UnknownLabel(s.to_string()))?;
                match family {
                    Some('A') => Self::A(rank),
                    Some('D') => Self::D(rank),
                    _ => return Err(RootError::UnknownLabel(s.to_string())),
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl Serialize for RootSystemKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootSystemKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite root system with its roots sorted lexicographically.
#[derive(Debug, Clone)]
pub struct RootSystem {
    kind: RootSystemKind,
    roots: Vec<RootVector>,
    index: FxHashMap<u64, u32>,
    simple_roots: Vec<RootVector>,
}

/// JSON form of a root system.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RootSystemRecord {
    pub label: RootSystemKind,
    pub rank: usize,
    pub roots: Vec<RootVector>,
}

impl RootSystem {
    pub fn kind(&self) -> RootSystemKind {
        self.kind
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }

    pub fn rank(&self) -> usize {
        self.kind.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.kind.ambient_dim()
    }

    pub fn coxeter_number(&self) -> usize {
        self.kind.coxeter_number()
    }

    pub fn max_sos_size(&self) -> usize {
        self.kind.max_sos_size()
    }

    pub fn is_simply_laced(&self) -> bool {
        self.kind.is_simply_laced()
    }

    pub fn roots(&self) -> &[RootVector] {
        &self.roots
    }

    pub fn simple_roots(&self) -> &[RootVector] {
        &self.simple_roots
    }

    pub fn is_root(&self, v: &RootVector) -> bool {
        v.dim() == self.ambient_dim() && self.index.contains_key(&v.key())
    }

    /// Position of `v` in [`roots`](Self::roots).
    pub fn root_index(&self, v: &RootVector) -> Option<usize> {
        if v.dim() != self.ambient_dim() {
            return None;
        }
        self.index.get(&v.key()).map(|&i| i as usize)
    }

    /// Neither `a + b` nor `a - b` is a root. Linearly dependent pairs
    /// (`b = ±a`) are never strongly orthogonal: a strongly orthogonal
    /// subset consists of distinct, non-antipodal roots.
    pub fn strongly_orthogonal(&self, a: &RootVector, b: &RootVector) -> Result<bool, RootError> {
        for r in [a, b] {
            if !self.is_root(r) {
                return Err(RootError::NotARoot(*r));
            }
        }
        if a == b || *a == -*b {
            return Ok(false);
        }
        let sum_is_root = a.checked_add(b).is_some_and(|s| self.is_root(&s));
        let diff_is_root = a.checked_sub(b).is_some_and(|d| self.is_root(&d));
        Ok(!sum_is_root && !diff_is_root)
    }

    pub fn simple_reflections(&self) -> Vec<ReflectionMap> {
        self.simple_roots.iter().map(|&a| ReflectionMap::new(a)).collect()
    }

    pub fn to_record(&self) -> RootSystemRecord {
        RootSystemRecord {
            label: self.kind,
            rank: self.rank(),
            roots: self.roots.clone(),
        }
    }
}

/// Builds the root system of the given type in doubled coordinates.
pub fn build_root_system(kind: RootSystemKind) -> Result<RootSystem, RootError> {
    kind.validate()?;
    let mut roots = match kind {
        RootSystemKind::G2 => g2_roots(),
        RootSystemKind::F4 => f4_roots(),
        RootSystemKind::E8 => e8_roots(),
        RootSystemKind::E7 => {
            let e1e8 = vec8(&[2, 0, 0, 0, 0, 0, 0, 2]);
            e8_roots().into_iter().filter(|r| r.dot(&e1e8) == 0).collect()
        }
        RootSystemKind::E6 => {
            let e1e7 = vec8(&[2, 0, 0, 0, 0, 0, 2, 0]);
            let e1e8 = vec8(&[2, 0, 0, 0, 0, 0, 0, 2]);
            e8_roots()
                .into_iter()
                .filter(|r| r.dot(&e1e7) == 0 && r.dot(&e1e8) == 0)
                .collect()
        }
        RootSystemKind::A(l) => {
            let n = l + 1;
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut c = vec![0; n];
                        c[i] = 2;
                        c[j] = -2;
                        out.push(RootVector::new(&c)?);
                    }
                }
            }
            out
        }
        RootSystemKind::D(l) => pm_ei_pm_ej(l),
    };
    roots.sort_unstable();
    roots.dedup();

    let index = roots
        .iter()
        .enumerate()
        .map(|(i, r)| (r.key(), i as u32))
        .collect();
    let simple_roots = simple_roots_of(&roots, kind.ambient_dim(), kind.rank())?;
    let rs = RootSystem {
        kind,
        roots,
        index,
        simple_roots,
    };
    check_construction(&rs)?;
    Ok(rs)
}

fn vec8(c: &[i32; 8]) -> RootVector {
    RootVector::new(c).expect("static vector")
}

/// `±2e_i ± 2e_j` for `i < j` in dimension `n`.
fn pm_ei_pm_ej(n: usize) -> Vec<RootVector> {
    let mut out = Vec::with_capacity(2 * n * (n - 1));
    for i in 0..n {
        for j in (i + 1)..n {
            for si in [2, -2] {
                for sj in [2, -2] {
                    let mut c = vec![0; n];
                    c[i] = si;
                    c[j] = sj;
                    out.push(RootVector::new(&c).expect("small coords"));
                }
            }
        }
    }
    out
}

fn g2_roots() -> Vec<RootVector> {
    let mut out = Vec::with_capacity(12);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            // short: e_i - e_j
            let mut c = [0i32; 3];
            c[i] = 2;
            c[j] = -2;
            out.push(RootVector::new(&c).expect("small coords"));
        }
        // long: ±(2e_i - e_j - e_k)
        let mut c = [-2i32; 3];
        c[i] = 4;
        let long = RootVector::new(&c).expect("small coords");
        out.push(long);
        out.push(-long);
    }
    out
}

fn f4_roots() -> Vec<RootVector> {
    let mut out = pm_ei_pm_ej(4);
    for i in 0..4 {
        for s in [2, -2] {
            let mut c = [0i32; 4];
            c[i] = s;
            out.push(RootVector::new(&c).expect("small coords"));
        }
    }
    for mask in 0u32..16 {
        let c: Vec<i32> = (0..4).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        out.push(RootVector::new(&c).expect("small coords"));
    }
    out
}

fn e8_roots() -> Vec<RootVector> {
    let mut out = pm_ei_pm_ej(8);
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            let c: Vec<i32> = (0..8).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            out.push(RootVector::new(&c).expect("small coords"));
        }
    }
    out
}

/// Picks a base from a fixed generic linear functional: positive roots are
/// those with positive value, simple roots are the positive roots that are
/// not a sum of two positive roots.
///
/// The functional has weights `9^(n-1-i)`; doubled root coordinates lie in
/// `[-4, 4]`, so it is a balanced base-9 expansion and vanishes on no root.
fn simple_roots_of(
    roots: &[RootVector],
    dim: usize,
    rank: usize,
) -> Result<Vec<RootVector>, RootError> {
    let weights: Vec<i64> = (0..dim).map(|i| 9i64.pow((dim - 1 - i) as u32)).collect();
    let height = |r: &RootVector| -> i64 {
        r.coords()
            .iter()
            .zip(&weights)
            .map(|(&c, &w)| i64::from(c) * w)
            .sum()
    };
    let positive: Vec<RootVector> = roots.iter().copied().filter(|r| height(r) > 0).collect();
    let positive_keys: rustc_hash::FxHashSet<u64> = positive.iter().map(|r| r.key()).collect();
    let mut simple: Vec<RootVector> = positive
        .iter()
        .copied()
        .filter(|r| {
            !positive.iter().any(|p| {
                r.checked_sub(p)
                    .is_some_and(|d| !d.is_zero() && positive_keys.contains(&d.key()))
            })
        })
        .collect();
    simple.sort_unstable();
    if simple.len() != rank {
        return Err(RootError::Inconsistent(format!(
            "found {} simple roots, expected {rank}",
            simple.len()
        )));
    }
    Ok(simple)
}

fn check_construction(rs: &RootSystem) -> Result<(), RootError> {
    let expected = rs.rank() * rs.coxeter_number();
    if rs.roots.len() != expected {
        return Err(RootError::Inconsistent(format!(
            "{}: |R| = {} but rank * h = {expected}",
            rs.kind,
            rs.roots.len()
        )));
    }
    for r in &rs.roots {
        if !rs.is_root(&-*r) {
            return Err(RootError::Inconsistent(format!("-{r} missing")));
        }
    }
    for s in rs.simple_reflections() {
        for r in &rs.roots {
            let image = s.apply(r)?;
            if !rs.is_root(&image) {
                return Err(RootError::Inconsistent(format!(
                    "reflection in {} sends {r} outside the root set",
                    s.root()
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(kind: RootSystemKind) -> RootSystem {
        build_root_system(kind).unwrap()
    }

    fn v(c: &[i32]) -> RootVector {
        RootVector::new(c).unwrap()
    }

    #[test]
    fn root_counts() {
        assert_eq!(rs(RootSystemKind::E8).roots().len(), 240);
        assert_eq!(rs(RootSystemKind::E7).roots().len(), 126);
        assert_eq!(rs(RootSystemKind::E6).roots().len(), 72);
        assert_eq!(rs(RootSystemKind::F4).roots().len(), 48);
        assert_eq!(rs(RootSystemKind::G2).roots().len(), 12);
    }

    #[test]
    fn a1_is_a_single_antipodal_pair() {
        let a1 = rs(RootSystemKind::A(1));
        assert_eq!(a1.roots(), &[v(&[-2, 2]), v(&[2, -2])]);
    }

    #[test]
    fn d4_matches_enumeration() {
        // 4 sign patterns times C(4,2) supports.
        assert_eq!(rs(RootSystemKind::D(4)).roots().len(), 4 * 6);
    }

    #[test]
    fn labels_parse() {
        assert_eq!("e8".parse::<RootSystemKind>().unwrap(), RootSystemKind::E8);
        assert_eq!("A(3)".parse::<RootSystemKind>().unwrap(), RootSystemKind::A(3));
        assert_eq!("D5".parse::<RootSystemKind>().unwrap(), RootSystemKind::D(5));
        assert!(matches!("H3".parse::<RootSystemKind>(), Err(RootError::UnknownLabel(_))));
        assert!(matches!(
            "D3".parse::<RootSystemKind>(),
            Err(RootError::RankOutOfRange { family: 'D', rank: 3 })
        ));
        assert!(build_root_system(RootSystemKind::A(0)).is_err());
        assert!(build_root_system(RootSystemKind::A(8)).is_err());
    }

    #[test]
    fn membership() {
        let e8 = rs(RootSystemKind::E8);
        assert!(e8.is_root(&v(&[2, 2, 0, 0, 0, 0, 0, 0])));
        assert!(!e8.is_root(&RootVector::zero(8)));
        let f4 = rs(RootSystemKind::F4);
        assert!(!f4.is_root(&v(&[4, 0, 0, 0])));
        assert!(!f4.is_root(&v(&[2, 0, 0])));
    }

    #[test]
    fn strong_orthogonality_examples() {
        let f4 = rs(RootSystemKind::F4);
        let e1 = v(&[2, 0, 0, 0]);
        let e2 = v(&[0, 2, 0, 0]);
        assert!(!f4.strongly_orthogonal(&e1, &e2).unwrap());

        let e8 = rs(RootSystemKind::E8);
        let a = v(&[2, 2, 0, 0, 0, 0, 0, 0]);
        let b = v(&[2, -2, 0, 0, 0, 0, 0, 0]);
        assert!(e8.strongly_orthogonal(&a, &b).unwrap());
        assert!(!e8.strongly_orthogonal(&a, &a).unwrap());
        assert!(!e8.strongly_orthogonal(&a, &-a).unwrap());
        assert!(matches!(
            e8.strongly_orthogonal(&a, &v(&[4, 0, 0, 0, 0, 0, 0, 0])),
            Err(RootError::NotARoot(_))
        ));
    }

    #[test]
    fn norms_per_type() {
        for kind in [RootSystemKind::E6, RootSystemKind::E7, RootSystemKind::E8] {
            assert!(rs(kind).roots().iter().all(|r| r.norm2() == 8));
        }
        let f4: Vec<i32> = rs(RootSystemKind::F4).roots().iter().map(|r| r.norm2()).collect();
        assert_eq!(f4.iter().filter(|&&n| n == 8).count(), 24);
        assert_eq!(f4.iter().filter(|&&n| n == 4).count(), 24);
        let g2 = rs(RootSystemKind::G2);
        assert!(g2.roots().iter().all(|r| r.norm2() == 8 || r.norm2() == 24));
        assert!(g2.roots().iter().all(|r| r.coords().iter().map(|&c| i32::from(c)).sum::<i32>() == 0));
    }

    #[test]
    fn simple_roots_have_rank_size_and_nonpositive_products() {
        for kind in RootSystemKind::EXCEPTIONAL
            .into_iter()
            .chain([RootSystemKind::A(3), RootSystemKind::D(5)])
        {
            let sys = rs(kind);
            let simple = sys.simple_roots();
            assert_eq!(simple.len(), sys.rank(), "{kind}");
            for (i, a) in simple.iter().enumerate() {
                for b in &simple[i + 1..] {
                    assert!(a.dot(b) <= 0, "{kind}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn record_serializes_sorted() {
        let g2 = rs(RootSystemKind::G2);
        let json = serde_json::to_string(&g2.to_record()).unwrap();
        let back: RootSystemRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.label, RootSystemKind::G2);
        assert!(back.roots.windows(2).all(|w| w[0] < w[1]));
    }
}

use std::path::Path;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Deserialize;

use super::SunflowerError;
use crate::roots::{RootSystem, RootVector};

pub type Rational = Ratio<i64>;

/// A linear map given by an exact rational matrix, applied to true (not
/// doubled) coordinates. Rows are output coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisChange {
    rows: Vec<Vec<Rational>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct BasisFile {
    rows: Vec<Vec<Entry>>,
}

fn parse_entry(e: &Entry) -> Result<Rational, SunflowerError> {
    match e {
        Entry::Int(i) => Ok(Rational::from_integer(*i)),
        Entry::Text(s) => {
            let bad = || SunflowerError::Basis(format!("cannot parse matrix entry {s:?}"));
            let s = s.trim();
            match s.split_once('/') {
                Some((p, q)) => {
                    let p: i64 = p.trim().parse().map_err(|_| bad())?;
                    let q: i64 = q.trim().parse().map_err(|_| bad())?;
                    if q == 0 {
                        return Err(bad());
                    }
                    Ok(Rational::new(p, q))
                }
                None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
            }
        }
    }
}

impl BasisChange {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, SunflowerError> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(SunflowerError::Basis("matrix must be non-empty and rectangular".into()));
        }
        Ok(Self { rows })
    }

    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// Parses `{"rows": [[1, "-1/2", ...], ...]}`; entries are integers or
    /// `"p/q"` strings.
    pub fn from_json(text: &str) -> Result<Self, SunflowerError> {
        let file: BasisFile = serde_json::from_str(text).map_err(|e| SunflowerError::Basis(e.to_string()))?;
        let rows = file
            .rows
            .iter()
            .map(|r| r.iter().map(parse_entry).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    pub fn from_file(path: &Path) -> Result<Self, SunflowerError> {
        let text = std::fs::read_to_string(path).map_err(|e| SunflowerError::Basis(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn input_dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.rows.len()
    }

    /// Image of `v`, in true coordinates.
    pub fn apply(&self, v: &RootVector) -> Vec<Rational> {
        let half = Rational::new(1, 2);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v.coords())
                    .map(|(a, &c)| *a * Rational::from_integer(i64::from(c)))
                    .sum::<Rational>()
                    * half
            })
            .collect()
    }

    /// Checks the map is defined on the ambient space of `rs` and injective
    /// on the span of its roots.
    pub fn check_for(&self, rs: &RootSystem) -> Result<(), SunflowerError> {
        if self.input_dim() != rs.ambient_dim() {
            return Err(SunflowerError::Basis(format!(
                "matrix takes {} coordinates, {} has {}",
                self.input_dim(),
                rs.kind(),
                rs.ambient_dim()
            )));
        }
        let images: Vec<Vec<Rational>> = rs.simple_roots().iter().map(|r| self.apply(r)).collect();
        let rank = rank(images);
        if rank != rs.rank() {
            return Err(SunflowerError::Basis(format!(
                "map has rank {rank} on the root span, which has dimension {}",
                rs.rank()
            )));
        }
        Ok(())
    }
}

fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c] / m[rank][c];
                let pivot = m[rank].clone();
                for (x, p) in m[r][c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Support mask of a rational vector.
pub fn rational_support(v: &[Rational]) -> u64 {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Re-expresses vertex vectors through `basis`, in true coordinates.
pub fn rebase_vertices(vectors: &[RootVector], basis: &BasisChange) -> Vec<Vec<Rational>> {
    vectors.iter().map(|v| basis.apply(v)).collect()
}

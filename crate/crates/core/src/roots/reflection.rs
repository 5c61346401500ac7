use num_rational::Ratio;

use super::{RootError, RootVector, VectorAction};

/// Reflection `s_a(v) = v - (2<v,a>/<a,a>) a` through the hyperplane orthogonal to a root.
///
/// The coefficient is scale-free, so it is evaluated directly on doubled
/// coordinates. For vectors in the root lattice it is an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReflectionMap {
    root: RootVector,
    root_norm2: i32,
}

impl ReflectionMap {
    pub fn new(root: RootVector) -> Self {
        let root_norm2 = root.norm2();
        assert!(root_norm2 > 0, "cannot reflect in the zero vector");
        Self { root, root_norm2 }
    }

    pub fn root(&self) -> RootVector {
        self.root
    }

    pub fn apply(&self, v: &RootVector) -> Result<RootVector, RootError> {
        let num = 2 * v.dot(&self.root);
        if num % self.root_norm2 != 0 {
            return Err(RootError::NonIntegralImage(*v));
        }
        v.checked_sub_multiple(num / self.root_norm2, &self.root)
            .ok_or(RootError::CoordinateOverflow)
    }

    /// Exact matrix `I - 2 a a^T / <a,a>`; columns are images of the basis vectors.
    pub fn matrix(&self) -> Vec<Vec<Ratio<i64>>> {
        let a = self.root.to_vec();
        let n = a.len();
        let norm = i64::from(self.root_norm2);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let delta = Ratio::from_integer(i64::from(i == j));
                        delta - Ratio::new(2 * i64::from(a[i]) * i64::from(a[j]), norm)
                    })
                    .collect()
            })
            .collect()
    }
}

impl VectorAction for ReflectionMap {
    fn act(&self, v: &RootVector) -> Result<RootVector, RootError> {
        self.apply(v)
    }
}

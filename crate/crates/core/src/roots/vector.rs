use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RootError;

/// Largest ambient dimension a [`RootVector`] can carry.
pub const MAX_DIM: usize = 8;

/// An exact lattice vector in doubled coordinates.
///
/// Every stored coordinate is twice the true coordinate, so the half-integer
/// roots of `F4` and the `E` series are integral. Inner products computed
/// here are therefore four times the true inner product.
///
/// Coordinates are held as `i8`; sums of up to eight roots and their
/// pairwise differences stay well inside that range. Unused trailing slots
/// are always zero, so the derived ordering is lexicographic on the
/// meaningful coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVector {
    coords: [i8; MAX_DIM],
    dim: u8,
}

impl RootVector {
    pub fn new(coords: &[i32]) -> Result<Self, RootError> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(RootError::DimensionTooLarge(coords.len()));
        }
        let mut out = [0i8; MAX_DIM];
        for (slot, &c) in out.iter_mut().zip(coords) {
            *slot = i8::try_from(c).map_err(|_| RootError::CoordinateOverflow)?;
        }
        Ok(Self {
            coords: out,
            dim: coords.len() as u8,
        })
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self {
            coords: [0; MAX_DIM],
            dim: dim as u8,
        }
    }

    /// Rebuilds a vector from its [`key`](Self::key).
    pub fn from_key(key: u64, dim: usize) -> Self {
        let bytes = key.to_le_bytes();
        let mut coords = [0i8; MAX_DIM];
        for (c, b) in coords.iter_mut().zip(bytes).take(dim) {
            *c = b as i8;
        }
        Self {
            coords,
            dim: dim as u8,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i8] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[i8; MAX_DIM] {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<i32> {
        self.coords().iter().map(|&c| i32::from(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0; MAX_DIM]
    }

    /// Doubled-coordinate dot product. Callers guarantee equal dimensions.
    #[inline]
    pub fn dot(&self, other: &Self) -> i32 {
        debug_assert_eq!(self.dim, other.dim);
        dot8(&self.coords, &other.coords)
    }

    #[inline]
    pub fn norm2(&self) -> i32 {
        self.dot(self)
    }

    /// Packs the coordinates into one word; injective for a fixed dimension.
    #[inline]
    pub fn key(&self) -> u64 {
        u64::from_le_bytes(self.coords.map(|c| c as u8))
    }

    /// Bit `i` is set when coordinate `i` is non-zero.
    pub fn support_mask(&self) -> u64 {
        self.coords()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, i8::checked_add)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, i8::checked_sub)
    }

    pub fn checked_scale(&self, factor: i32) -> Option<Self> {
        let factor = i8::try_from(factor).ok()?;
        let mut out = *self;
        for c in out.coords.iter_mut() {
            *c = c.checked_mul(factor)?;
        }
        Some(out)
    }

    /// `self - factor * other`, used by reflections.
    pub(crate) fn checked_sub_multiple(&self, factor: i32, other: &Self) -> Option<Self> {
        let mut out = *self;
        for (c, &o) in out.coords.iter_mut().zip(other.coords.iter()) {
            let v = i32::from(*c) - factor * i32::from(o);
            *c = i8::try_from(v).ok()?;
        }
        Some(out)
    }

    /// Applies a coordinate permutation: output coordinate `perm[i]` takes input coordinate `i`.
    pub(crate) fn permuted(&self, perm: &[u8; MAX_DIM]) -> Self {
        let mut out = [0i8; MAX_DIM];
        for i in 0..self.dim as usize {
            out[perm[i] as usize] = self.coords[i];
        }
        Self {
            coords: out,
            dim: self.dim,
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i8, i8) -> Option<i8>) -> Option<Self> {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for (c, &o) in out.coords.iter_mut().zip(other.coords.iter()) {
            *c = f(*c, o)?;
        }
        Some(out)
    }
}

#[inline(always)]
pub(crate) fn dot8(a: &[i8; MAX_DIM], b: &[i8; MAX_DIM]) -> i32 {
    let mut acc = 0i32;
    for t in 0..MAX_DIM {
        acc += i32::from(a[t]) * i32::from(b[t]);
    }
    acc
}

impl std::ops::Neg for RootVector {
    type Output = Self;

    fn neg(self) -> Self {
        // i8::MIN never occurs: constructors and checked ops keep |c| < 128.
        Self {
            coords: self.coords.map(|c| -c),
            dim: self.dim,
        }
    }
}

impl std::ops::Add for RootVector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("coordinate overflow in vector addition")
    }
}

impl std::ops::Sub for RootVector {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("coordinate overflow in vector subtraction")
    }
}

/// Exact dot product with a dimension check. The true inner product is the
/// returned value divided by four.
pub fn inner_product(v: &RootVector, w: &RootVector) -> Result<i32, RootError> {
    if v.dim() != w.dim() {
        return Err(RootError::DimensionMismatch {
            left: v.dim(),
            right: w.dim(),
        });
    }
    Ok(v.dot(w))
}

impl fmt::Debug for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootVector{:?}", self.coords())
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for RootVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coords = Vec::<i32>::deserialize(deserializer)?;
        RootVector::new(&coords).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i32]) -> RootVector {
        RootVector::new(c).unwrap()
    }

    #[test]
    fn orthogonal_pair_has_zero_product() {
        let a = v(&[2, 2, 0, 0, 0, 0, 0, 0]);
        let b = v(&[2, -2, 0, 0, 0, 0, 0, 0]);
        assert_eq!(inner_product(&a, &b).unwrap(), 0);
    }

    #[test]
    fn doubled_product_is_four_times_true() {
        // e1+e2 and e1+e3 have true inner product 1.
        let a = v(&[2, 2, 0, 0, 0, 0, 0, 0]);
        let b = v(&[2, 0, 2, 0, 0, 0, 0, 0]);
        assert_eq!(inner_product(&a, &b).unwrap(), 4);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = v(&[2, 2, 0, 0]);
        let b = v(&[2, 0, 2]);
        assert!(matches!(
            inner_product(&a, &b),
            Err(RootError::DimensionMismatch { left: 4, right: 3 })
        ));
    }

    #[test]
    fn key_round_trips_and_orders() {
        let a = v(&[-1, 1, -1, 1, 1, 1, -1, -1]);
        assert_eq!(RootVector::from_key(a.key(), 8), a);
        assert!(v(&[-2, 0, 0]) < v(&[0, -2, 0]));
        assert_eq!(a.support_mask(), 0xff);
        assert_eq!(v(&[0, 2, 0, -2]).support_mask(), 0b1010);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(RootVector::new(&[200]).is_err());
        let big = v(&[100]);
        assert!(big.checked_add(&big).is_none());
        assert!(big.checked_scale(2).is_none());
    }

    #[test]
    fn permutation_moves_coordinates() {
        let a = v(&[1, 2, 3]);
        let mut perm = [0u8; MAX_DIM];
        perm[..3].copy_from_slice(&[2, 0, 1]);
        assert_eq!(a.permuted(&perm).to_vec(), vec![2, 3, 1]);
    }
}

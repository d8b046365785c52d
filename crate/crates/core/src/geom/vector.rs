use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Inputs shorter than this are rejected by [`unit`].
const MIN_NORM: f64 = 1e-14;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A direction on the unit sphere `S^{n-1}`, `n >= 2`.
#[derive(Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

/// Normalizes `v`.
pub fn unit(v: &[f64]) -> Result<UnitVector> {
    UnitVector::new(v.to_vec())
}

impl UnitVector {
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::UnsupportedDimension {
                got: coords.len(),
                expected: ">= 2".into(),
            });
        }
        let n = norm(&coords);
        if !(n > MIN_NORM) {
            return Err(Error::ZeroVector { norm: n });
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Ok(UnitVector(coords))
    }

    /// Wraps coordinates that are already normalized. Only a debug check
    /// guards the invariant.
    pub(crate) fn from_normalized(coords: Vec<f64>) -> Self {
        debug_assert!(
            (norm(&coords) - 1.0).abs() < 1e-9,
            "not normalized: {coords:?}"
        );
        UnitVector(coords)
    }

    /// The `i`-th standard basis vector of `R^n`.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        UnitVector(c)
    }

    /// North pole `e_n` (the last coordinate axis).
    pub fn north_pole(n: usize) -> Self {
        Self::axis(n, n - 1)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Geodesic distance on the sphere.
    pub fn angle_to(&self, other: &UnitVector) -> f64 {
        geodesic(&self.0, &other.0)
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|c| -c).collect())
    }
}

/// Angle between two unit vectors, accurate for nearly parallel inputs.
pub(crate) fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut diff = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += (x + y) * (x + y);
        diff += (x - y) * (x - y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

impl Index<usize> for UnitVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Debug for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("UnitVector").field(&self.0).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scales_to_unit_norm() {
        let u = unit(&[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(u.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn already_unit_is_unchanged() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = unit(&[s, s, 0.0]).unwrap();
        assert_abs_diff_eq!(u[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(norm(u.as_slice()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(matches!(
            unit(&[0.0, 0.0, 0.0]),
            Err(Error::ZeroVector { .. })
        ));
        assert!(matches!(
            unit(&[1e-15, 0.0, 0.0]),
            Err(Error::ZeroVector { .. })
        ));
        assert!(matches!(
            unit(&[f64::NAN, 0.0]),
            Err(Error::ZeroVector { .. })
        ));
    }

    #[test]
    fn one_dimensional_is_rejected() {
        assert!(matches!(
            unit(&[1.0]),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn geodesic_is_accurate_near_zero_and_pi() {
        let a = unit(&[1.0, 0.0, 0.0]).unwrap();
        let b = unit(&[1.0, 1e-9, 0.0]).unwrap();
        assert_abs_diff_eq!(a.angle_to(&b), 1e-9, epsilon = 1e-20);
        assert_abs_diff_eq!(a.angle_to(&a.neg()), std::f64::consts::PI, epsilon = 1e-15);
    }
}

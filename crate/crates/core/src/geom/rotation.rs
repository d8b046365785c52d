use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::vector::UnitVector;
use super::{COMPOSED_TOL, CONSTRUCTION_TOL};
use crate::error::{Error, Result};

/// An element of `SO(n)`, stored as an explicit orthogonal matrix so the
/// transpose in `h_{φK}(u) = h_K(φᵗu)` is a direct operation.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    m: DMatrix<f64>,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        Rotation {
            m: DMatrix::identity(n, n),
        }
    }

    /// Validates `MᵀM = I` and `det M = +1` within `1e-10`.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() < 2 {
            return Err(Error::NotARotation(format!(
                "shape {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let err = (m.transpose() * &m - DMatrix::<f64>::identity(n, n)).amax();
        if err > COMPOSED_TOL {
            return Err(Error::NotARotation(format!("orthogonality error {err:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > COMPOSED_TOL {
            return Err(Error::NotARotation(format!("determinant {det}")));
        }
        Ok(Rotation { m })
    }

    /// Row-major entries.
    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::NotARotation(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(n, n, entries))
    }

    /// Rotation of `R^3` by `angle` about `axis` (right-hand rule).
    pub fn about_axis(axis: &UnitVector, angle: f64) -> Self {
        assert_eq!(axis.dim(), 3, "axis-angle rotations are three-dimensional");
        let (s, c) = angle.sin_cos();
        let [x, y, z] = [axis[0], axis[1], axis[2]];
        let t = 1.0 - c;
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(3, 3, &[
            t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
            t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
            t * x * z - s * y, t * y * z + s * x, t * z * z + c,
        ]);
        Rotation { m }
    }

    /// Rotation by `angle` in the plane spanned by orthonormal `a`, `b`,
    /// taking `a` towards `b` and fixing the orthogonal complement.
    pub fn in_plane(a: &UnitVector, b: &UnitVector, angle: f64) -> Self {
        let n = a.dim();
        assert_eq!(n, b.dim());
        debug_assert!(a.dot(b).abs() < 1e-9, "plane vectors must be orthogonal");
        let (s, c) = angle.sin_cos();
        let av = nalgebra::DVector::from_column_slice(a.as_slice());
        let bv = nalgebra::DVector::from_column_slice(b.as_slice());
        let proj = &av * av.transpose() + &bv * bv.transpose();
        let skew = &bv * av.transpose() - &av * bv.transpose();
        let m = DMatrix::identity(n, n) + proj * (c - 1.0) + skew * s;
        Rotation { m }
    }

    /// Rotation taking unit `from` to unit `to` along the great circle
    /// between them; identity on the orthogonal complement of their span.
    /// Antipodal inputs pick the first coordinate axis not parallel to
    /// `from` to fix the plane.
    pub fn aligning(from: &UnitVector, to: &UnitVector) -> Self {
        let n = from.dim();
        let c = from.dot(to);
        if c > 1.0 - 1e-15 {
            return Self::identity(n);
        }
        let f = from.as_slice();
        let mut w: Vec<f64> = to
            .as_slice()
            .iter()
            .zip(f)
            .map(|(t, a)| t - c * a)
            .collect();
        if super::vector::norm(&w) < 1e-12 {
            let i = (0..n).find(|&i| f[i].abs() < 0.9).unwrap_or(0);
            w = vec![0.0; n];
            w[i] = 1.0;
            let d = f[i];
            w.iter_mut().zip(f).for_each(|(x, a)| *x -= d * a);
        }
        let b = UnitVector::new(w).expect("nonzero orthogonal part");
        Self::in_plane(from, &b, from.angle_to(to))
    }

    /// Haar-distributed random rotation. In `R^3` this is the quaternion
    /// construction from three uniform variates; otherwise QR of a Gaussian
    /// matrix with the sign fix that makes the result Haar.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        if n == 3 {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            let u3: f64 = rng.random();
            let tau = std::f64::consts::TAU;
            let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
            let q = [
                a * (tau * u2).sin(),
                a * (tau * u2).cos(),
                b * (tau * u3).sin(),
                b * (tau * u3).cos(),
            ];
            return Self::from_quaternion(q[3], q[0], q[1], q[2]);
        }
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        Rotation { m: q }
    }

    fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(3, 3, &[
            1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w),       2.0 * (x * z + y * w),
            2.0 * (x * y + z * w),       1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w),
            2.0 * (x * z - y * w),       2.0 * (y * z + x * w),       1.0 - 2.0 * (x * x + y * y),
        ]);
        Rotation { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Row-major entries.
    pub fn to_rows(&self) -> Vec<f64> {
        self.m.transpose().as_slice().to_vec()
    }

    pub fn transpose(&self) -> Rotation {
        Rotation {
            m: self.m.transpose(),
        }
    }

    pub fn inverse(&self) -> Rotation {
        self.transpose()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            m: &self.m * &other.m,
        }
    }

    /// `M x` into `out`.
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|j| self.m[(i, j)] * x[j]).sum();
        }
    }

    /// `Mᵀ x` into `out`.
    #[inline]
    pub fn apply_transpose_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (j, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|i| self.m[(i, j)] * x[i]).sum();
        }
    }

    pub fn apply(&self, u: &UnitVector) -> UnitVector {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(u.as_slice(), &mut out);
        renormalized(out)
    }

    pub fn apply_transpose(&self, u: &UnitVector) -> UnitVector {
        let mut out = vec![0.0; self.dim()];
        self.apply_transpose_into(u.as_slice(), &mut out);
        renormalized(out)
    }

    /// Largest entry of `MᵀM - I` and `|det M - 1|`.
    pub fn orthogonality_error(&self) -> (f64, f64) {
        let n = self.dim();
        let ortho = (self.m.transpose() * &self.m - DMatrix::<f64>::identity(n, n)).amax();
        (ortho, (self.m.determinant() - 1.0).abs())
    }
}

fn renormalized(mut v: Vec<f64>) -> UnitVector {
    let n = super::vector::norm(&v);
    if (n - 1.0).abs() > CONSTRUCTION_TOL {
        v.iter_mut().for_each(|c| *c /= n);
    }
    UnitVector::from_normalized(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::unit;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn axis_rotation_quarter_turn() {
        let rx = Rotation::about_axis(&UnitVector::axis(3, 0), FRAC_PI_2);
        let v = rx.apply(&UnitVector::axis(3, 1));
        assert_abs_diff_eq!(v[2], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn in_plane_matches_axis_angle() {
        let a = UnitVector::axis(3, 1);
        let b = UnitVector::axis(3, 2);
        let p = Rotation::in_plane(&a, &b, 0.7);
        let q = Rotation::about_axis(&UnitVector::axis(3, 0), 0.7);
        assert!((p.matrix() - q.matrix()).amax() < 1e-15);
    }

    #[test]
    fn aligning_maps_from_to_to() {
        let a = unit(&[0.2, -0.5, 0.8]).unwrap();
        let b = unit(&[-0.7, 0.1, 0.3]).unwrap();
        let r = Rotation::aligning(&a, &b);
        let img = r.apply(&a);
        for i in 0..3 {
            assert_abs_diff_eq!(img[i], b[i], epsilon = 1e-12);
        }
        let r = Rotation::aligning(&a, &a.neg());
        let img = r.apply(&a);
        for i in 0..3 {
            assert_abs_diff_eq!(img[i], -a[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_reflections() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0]));
        assert!(Rotation::from_matrix(m).is_err());
    }

    #[test]
    fn random_rotations_are_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 4, 6] {
            for _ in 0..20 {
                let r = Rotation::random(n, &mut rng);
                let (o, d) = r.orthogonality_error();
                assert!(o < 1e-12 && d < 1e-12, "n={n} o={o} d={d}");
            }
        }
    }

    #[test]
    fn random_rotations_are_seed_deterministic() {
        let a = Rotation::random(3, &mut ChaCha8Rng::seed_from_u64(42));
        let b = Rotation::random(3, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn transpose_is_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Rotation::random(3, &mut rng);
        let u = unit(&[0.1, 0.2, 0.3]).unwrap();
        let back = r.apply_transpose(&r.apply(&u));
        for i in 0..3 {
            assert_abs_diff_eq!(back[i], u[i], epsilon = 1e-14);
        }
    }
}

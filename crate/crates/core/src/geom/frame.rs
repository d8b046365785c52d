use super::vector::{dot, norm, UnitVector};

/// A hyperplane `ξ^⊥` together with an orthonormal basis that fixes
/// in-plane coordinates.
///
/// For `n = 3` the basis `(e1, e2)` is right-handed: `e1 × e2 = ξ`, so a
/// positive in-plane angle is a counterclockwise rotation seen from `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneFrame {
    normal: UnitVector,
    basis: Vec<UnitVector>,
}

/// Unit normal `(-sin θ, 0, cos θ)` of the section plane at vertical angle
/// `θ` from the `z`-axis.
pub fn meridian_direction(theta: f64) -> UnitVector {
    UnitVector::from_normalized(vec![-theta.sin(), 0.0, theta.cos()])
}

/// Deterministic orthonormal basis of `ξ^⊥`.
///
/// In `R^3`, normals lying in the `xz`-plane get the meridian frame
/// `e1 = (ξ_z, 0, -ξ_x)`, `e2 = (0, 1, 0)`; for `ξ = (-sin θ, 0, cos θ)` this
/// is `e1 = (cos θ, 0, sin θ)`. Every other normal is completed by
/// Gram–Schmidt against the first coordinate axes with `|ξ·e_i| < 0.9`.
pub fn frame_for(xi: &UnitVector) -> PlaneFrame {
    let n = xi.dim();
    let x = xi.as_slice();
    if n == 3 && x[1] == 0.0 {
        let e1 = UnitVector::new(vec![x[2], 0.0, -x[0]]).expect("unit normal has nonzero xz part");
        let e2 = UnitVector::axis(3, 1);
        return PlaneFrame {
            normal: xi.clone(),
            basis: vec![e1, e2],
        };
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        if basis.len() == n - 1 || (n == 3 && basis.len() == 1) {
            break;
        }
        if x[i].abs() >= 0.9 {
            continue;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        orthogonalize(&mut v, x);
        for b in &basis {
            orthogonalize(&mut v, b);
        }
        let len = norm(&v);
        v.iter_mut().for_each(|c| *c /= len);
        basis.push(v);
    }
    if n == 3 {
        basis.push(cross(x, &basis[0]));
    }
    PlaneFrame {
        normal: xi.clone(),
        basis: basis.into_iter().map(UnitVector::from_normalized).collect(),
    }
}

fn orthogonalize(v: &mut [f64], against: &[f64]) {
    let d = dot(v, against);
    v.iter_mut().zip(against).for_each(|(a, b)| *a -= d * b);
}

pub(crate) fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl PlaneFrame {
    pub fn normal(&self) -> &UnitVector {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn e1(&self) -> &UnitVector {
        &self.basis[0]
    }

    pub fn e2(&self) -> &UnitVector {
        &self.basis[1]
    }

    /// All `n - 1` basis vectors of the hyperplane.
    pub fn basis(&self) -> &[UnitVector] {
        &self.basis
    }

    /// The direction `cos(u) e1 + sin(u) e2`, written into `out`.
    #[inline]
    pub fn direction_into(&self, u: f64, out: &mut [f64]) {
        let (s, c) = u.sin_cos();
        let e1 = self.basis[0].as_slice();
        let e2 = self.basis[1].as_slice();
        for ((o, a), b) in out.iter_mut().zip(e1).zip(e2) {
            *o = c * a + s * b;
        }
    }

    pub fn direction(&self, u: f64) -> UnitVector {
        let mut out = vec![0.0; self.dim()];
        self.direction_into(u, &mut out);
        UnitVector::from_normalized(out)
    }

    /// Maps in-plane coordinates `w` (length `n - 1`) to a vector of `R^n`.
    pub fn embed(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (wi, b) in w.iter().zip(&self.basis) {
            out.iter_mut()
                .zip(b.as_slice())
                .for_each(|(o, c)| *o += wi * c);
        }
        out
    }
}

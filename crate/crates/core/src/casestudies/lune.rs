use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geom::{dot, UnitVector};

/// Orthonormal basis `(a, b)` of the plane spanned by unit vectors `x, y`.
fn plane_basis(x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = dot(x, y);
    let mut b: Vec<f64> = y.iter().zip(x).map(|(yi, xi)| yi - d * xi).collect();
    let len = crate::geom::norm(&b);
    if len < 1e-12 {
        return None;
    }
    b.iter_mut().for_each(|c| *c /= len);
    Some((x.to_vec(), b))
}

/// Uniform point of the geodesic disk of radius `delta` around `c`.
fn sample_disk<R: Rng>(c: &[f64], delta: f64, rng: &mut R) -> Vec<f64> {
    let n = c.len();
    // Uniform in area: P(t ≤ s) = (1 − cos s)/(1 − cos δ).
    let u: f64 = rng.random();
    let t = (1.0 - u * (1.0 - delta.cos())).acos();
    let mut w: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let d = dot(&w, c);
    w.iter_mut().zip(c).for_each(|(wi, ci)| *wi -= d * ci);
    let len = crate::geom::norm(&w).max(1e-300);
    let (s, co) = t.sin_cos();
    c.iter()
        .zip(&w)
        .map(|(ci, wi)| co * ci + s * wi / len)
        .collect()
}

/// Largest angular distance from a point of the great circle through
/// `x, y` to the reference great circle in the plane `(a1, a2)`: the arcsine
/// of the largest singular value of the out-of-plane components.
fn circle_deviation(a1: &[f64], a2: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let Some((b1, b2)) = plane_basis(x, y) else {
        return 0.0;
    };
    let residual = |v: &[f64]| -> Vec<f64> {
        let p = dot(v, a1);
        let q = dot(v, a2);
        v.iter()
            .zip(a1)
            .zip(a2)
            .map(|((vi, s), t)| vi - p * s - q * t)
            .collect()
    };
    let (r1, r2) = (residual(&b1), residual(&b2));
    let (g11, g12, g22) = (dot(&r1, &r1), dot(&r1, &r2), dot(&r2, &r2));
    let tr = g11 + g22;
    let det = g11 * g22 - g12 * g12;
    let lambda = 0.5 * tr + (0.25 * tr * tr - det).max(0.0).sqrt();
    lambda.sqrt().min(1.0).asin()
}

/// Monte-Carlo estimate of the width of the lune swept by great circles
/// meeting both geodesic disks of radius `delta` around `vi` and `vj`: the
/// largest deviation, over sampled pairs `x ∈ D(vi)`, `y ∈ D(vj)`, of the
/// great circle through `x, y` from the one through `vi, vj`.
pub fn lune_width(
    vi: &UnitVector,
    vj: &UnitVector,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if vi.dim() != vj.dim() {
        return Err(Error::DimensionMismatch {
            left: vi.dim(),
            right: vj.dim(),
        });
    }
    let sep = vi.angle_to(vj);
    if sep < 1e-9 || std::f64::consts::PI - sep < 1e-9 {
        return Err(Error::DegenerateConfig(
            "lune centers are equal or antipodal".into(),
        ));
    }
    if !(delta >= 0.0 && delta < sep / 4.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in [0, {})",
            sep / 4.0
        )));
    }
    let (a1, a2) = plane_basis(vi.as_slice(), vj.as_slice()).expect("checked separation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut widest = 0.0f64;
    for _ in 0..samples {
        let x = sample_disk(vi.as_slice(), delta, &mut rng);
        let y = sample_disk(vj.as_slice(), delta, &mut rng);
        widest = widest.max(circle_deviation(&a1, &a2, &x, &y));
    }
    Ok(widest)
}

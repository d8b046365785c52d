//! Unit sphere perturbed by smooth compactly supported bumps.

use crate::geom::{dot, golden_max, UnitVector};

/// C² cap profile `(1 - s²)³` on `s ∈ [0, 1)`, zero beyond.
#[inline]
pub fn cap_profile(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        q * q * q
    }
}

/// Largest value of `|d/ds (1 - s²)³|`, attained at `s = 1/√5`.
pub const CAP_PROFILE_MAX_SLOPE: f64 = 1.717_300_206_719_838_4;
/// Largest value of `d²/ds² (1 - s²)³`, attained at `s² = 3/5`.
pub const CAP_PROFILE_MAX_CONVEX_CURVATURE: f64 = 4.8;

/// Radially symmetric bump of height `height` supported in the geodesic
/// disk of radius `radius` around `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cap {
    pub center: UnitVector,
    pub radius: f64,
    pub height: f64,
}

/// A bump profile slid along the great subsphere `pole^⊥`: its value depends
/// only on the geodesic distance to that subsphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub pole: UnitVector,
    pub radius: f64,
    pub height: f64,
}

impl Cap {
    #[inline]
    pub fn value(&self, u: &[f64]) -> f64 {
        let c = self.center.as_slice();
        let d = dot(u, c);
        if d <= self.radius.cos() {
            return 0.0;
        }
        let chord2: f64 = u.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
        let t = 2.0 * (chord2.sqrt() / 2.0).min(1.0).asin();
        self.height * cap_profile(t / self.radius)
    }
}

impl Band {
    #[inline]
    pub fn value(&self, u: &[f64]) -> f64 {
        let d = dot(u, self.pole.as_slice()).abs().min(1.0);
        if d >= self.radius.sin() {
            return 0.0;
        }
        self.height * cap_profile(d.asin() / self.radius)
    }
}

/// Radial function `1 + Σ caps + Σ bands`.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSurface {
    dim: usize,
    caps: Vec<Cap>,
    bands: Vec<Band>,
}

impl BumpSurface {
    pub fn new(dim: usize, caps: Vec<Cap>, bands: Vec<Band>) -> Self {
        debug_assert!(caps.iter().all(|c| c.center.dim() == dim));
        debug_assert!(bands.iter().all(|b| b.pole.dim() == dim));
        BumpSurface { dim, caps, bands }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    #[inline]
    pub fn radial(&self, u: &[f64]) -> f64 {
        let caps: f64 = self.caps.iter().map(|c| c.value(u)).sum();
        let bands: f64 = self.bands.iter().map(|b| b.value(u)).sum();
        1.0 + caps + bands
    }

    /// Upper bound on the radial function.
    pub fn max_radius(&self) -> f64 {
        1.0 + self.caps.iter().map(|c| c.height).sum::<f64>()
            + self.bands.iter().map(|b| b.height).sum::<f64>()
    }

    /// Geodesic Lipschitz bound of the radial function.
    pub fn lipschitz(&self) -> f64 {
        let caps: f64 = self.caps.iter().map(|c| c.height / c.radius).sum();
        let bands: f64 = self.bands.iter().map(|b| b.height / b.radius).sum();
        CAP_PROFILE_MAX_SLOPE * (caps + bands)
    }

    /// Support function `max_v ρ(v) (v·u)`.
    ///
    /// The maximizer lies within `arccos(1/ρ_max)` of `u`. For a single
    /// radially symmetric bump it lies on the great circle through `u` and
    /// the bump's center, so each feature within reach is searched along
    /// that arc.
    pub fn support(&self, u: &[f64]) -> f64 {
        let reach = (1.0 / self.max_radius()).acos();
        let uu = UnitVector::from_normalized(u.to_vec());
        let mut best = self.radial(u);
        let mut targets: Vec<(UnitVector, f64)> = Vec::new();
        for c in &self.caps {
            let dist = uu.angle_to(&c.center);
            if dist < reach + c.radius {
                targets.push((c.center.clone(), dist));
            }
        }
        for b in &self.bands {
            // Nearest point of the band's great subsphere.
            let p = b.pole.as_slice();
            let d = dot(u, p);
            let foot: Vec<f64> = u.iter().zip(p).map(|(x, q)| x - d * q).collect();
            if let Ok(f) = UnitVector::new(foot) {
                let dist = d.abs().min(1.0).asin();
                if dist < reach + b.radius {
                    targets.push((f, dist));
                }
            }
        }
        for (target, dist) in targets {
            if dist < 1e-15 {
                continue;
            }
            let (sd, cd) = dist.sin_cos();
            let w: Vec<f64> = target
                .as_slice()
                .iter()
                .zip(u)
                .map(|(t, x)| (t - cd * x) / sd)
                .collect();
            let mut v = vec![0.0; u.len()];
            let mut eval = |t: f64| {
                let (s, c) = t.sin_cos();
                for ((vi, a), b) in v.iter_mut().zip(u).zip(&w) {
                    *vi = c * a + s * b;
                }
                self.radial(&v) * c
            };
            let hi = (dist + reach).min(std::f64::consts::FRAC_PI_2);
            let samples = 64;
            let h = hi / samples as f64;
            let (arg, val) = (0..=samples)
                .map(|k| {
                    let t = h * k as f64;
                    (t, eval(t))
                })
                .fold(
                    (0.0, f64::NEG_INFINITY),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                );
            let (_, refined) = golden_max(&mut eval, (arg - h).max(0.0), (arg + h).min(hi), 60);
            best = best.max(val).max(refined);
        }
        best
    }
}

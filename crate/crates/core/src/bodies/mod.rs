//! Star and convex bodies given by radial and support function oracles.
//!
//! A [`BodySpec`] is an immutable description: catalog bodies with closed
//! forms, bump spheres, and the polar/rotation/dilation wrappers. All
//! oracles are pure and can be evaluated concurrently.

mod bump;
mod format;
mod width;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::casestudies::{BumpParams, BumpRole};
use crate::error::{Error, Result};
use crate::geom::{Rotation, UnitVector};

pub use bump::{
    cap_profile, Band, BumpSurface, Cap, CAP_PROFILE_MAX_CONVEX_CURVATURE, CAP_PROFILE_MAX_SLOPE,
};
pub use width::{diameter_directions, width};

/// Components below this are treated as zero when a closed form divides by
/// them (the corresponding face constraint is vacuous).
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

pub(crate) type Scratch = SmallVec<[f64; 8]>;

/// Sphere with bumps, tagged with the parameters it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSphere {
    pub params: BumpParams,
    pub role: BumpRole,
    pub surface: BumpSurface,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodySpec {
    /// Centered ball of the given radius in `R^dim`.
    Ball {
        radius: f64,
        dim: usize,
    },
    /// `{ x² + y² ≤ r², |z| ≤ hh }` in `R^3`.
    Cylinder {
        radius: f64,
        half_height: f64,
    },
    /// Convex hull of the circle of radius `a` in the `xy`-plane and
    /// `(0, 0, ±c)`.
    DoubleCone {
        base_radius: f64,
        apex_height: f64,
    },
    BumpSphere(Arc<BumpSphere>),
    Polar(Box<BodySpec>),
    Rotated(Rotation, Box<BodySpec>),
    Dilated(f64, Box<BodySpec>),
}

impl BodySpec {
    pub fn ball(radius: f64) -> Self {
        BodySpec::Ball { radius, dim: 3 }
    }

    pub fn ball_in(dim: usize, radius: f64) -> Self {
        BodySpec::Ball { radius, dim }
    }

    pub fn cylinder(radius: f64, half_height: f64) -> Self {
        BodySpec::Cylinder {
            radius,
            half_height,
        }
    }

    pub fn double_cone(base_radius: f64, apex_height: f64) -> Self {
        BodySpec::DoubleCone {
            base_radius,
            apex_height,
        }
    }

    pub fn dilated(self, c: f64) -> Self {
        BodySpec::Dilated(c, Box::new(self))
    }

    /// Checks that every scalar parameter is finite and positive and that
    /// wrapped rotations match the body's dimension.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {x} must be positive"
                )))
            }
        };
        match self {
            BodySpec::Ball { radius, dim } => {
                if *dim < 2 {
                    return Err(Error::UnsupportedDimension {
                        got: *dim,
                        expected: ">= 2".into(),
                    });
                }
                positive("R", *radius)
            }
            BodySpec::Cylinder {
                radius,
                half_height,
            } => positive("r", *radius).and(positive("hh", *half_height)),
            BodySpec::DoubleCone {
                base_radius,
                apex_height,
            } => positive("a", *base_radius).and(positive("c", *apex_height)),
            BodySpec::BumpSphere(b) => b.params.validate(),
            BodySpec::Polar(inner) => inner.validate(),
            BodySpec::Rotated(r, inner) => {
                inner.validate()?;
                if r.dim() != inner.dim() {
                    return Err(Error::DimensionMismatch {
                        left: r.dim(),
                        right: inner.dim(),
                    });
                }
                Ok(())
            }
            BodySpec::Dilated(c, inner) => positive("c", *c).and(inner.validate()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Ball { dim, .. } => *dim,
            BodySpec::Cylinder { .. } | BodySpec::DoubleCone { .. } => 3,
            BodySpec::BumpSphere(b) => b.surface.dim(),
            BodySpec::Polar(inner) | BodySpec::Rotated(_, inner) | BodySpec::Dilated(_, inner) => {
                inner.dim()
            }
        }
    }

    /// Whether the body is convex by construction. Bump spheres are only
    /// numerically checked, so they report `false`.
    pub fn is_convex(&self) -> bool {
        match self {
            BodySpec::BumpSphere(_) => false,
            BodySpec::Polar(_) => true,
            BodySpec::Rotated(_, inner) | BodySpec::Dilated(_, inner) => inner.is_convex(),
            _ => true,
        }
    }

    /// Radial function `ρ(u) = max{c : c·u ∈ K}` at a unit vector given as
    /// a slice.
    pub fn radial_at(&self, u: &[f64]) -> f64 {
        match self {
            BodySpec::Ball { radius, .. } => *radius,
            BodySpec::Cylinder {
                radius,
                half_height,
            } => {
                let s = u[0].hypot(u[1]);
                let z = u[2].abs();
                let side = if s < DEGENERATE_DENOMINATOR {
                    f64::INFINITY
                } else {
                    radius / s
                };
                let cap = if z < DEGENERATE_DENOMINATOR {
                    f64::INFINITY
                } else {
                    half_height / z
                };
                side.min(cap)
            }
            BodySpec::DoubleCone {
                base_radius,
                apex_height,
            } => 1.0 / (u[0].hypot(u[1]) / base_radius + u[2].abs() / apex_height),
            BodySpec::BumpSphere(b) => b.surface.radial(u),
            BodySpec::Polar(inner) => 1.0 / inner.support_at(u),
            BodySpec::Rotated(r, inner) => {
                let mut v: Scratch = SmallVec::from_elem(0.0, u.len());
                r.apply_transpose_into(u, &mut v);
                inner.radial_at(&v)
            }
            BodySpec::Dilated(c, inner) => c * inner.radial_at(u),
        }
    }

    /// Support function `h(u) = max{u·y : y ∈ K}`.
    pub fn support_at(&self, u: &[f64]) -> f64 {
        match self {
            BodySpec::Ball { radius, .. } => *radius,
            BodySpec::Cylinder {
                radius,
                half_height,
            } => radius * u[0].hypot(u[1]) + half_height * u[2].abs(),
            BodySpec::DoubleCone {
                base_radius,
                apex_height,
            } => (base_radius * u[0].hypot(u[1])).max(apex_height * u[2].abs()),
            BodySpec::BumpSphere(b) => b.surface.support(u),
            BodySpec::Polar(inner) => 1.0 / inner.radial_at(u),
            BodySpec::Rotated(r, inner) => {
                let mut v: Scratch = SmallVec::from_elem(0.0, u.len());
                r.apply_transpose_into(u, &mut v);
                inner.support_at(&v)
            }
            BodySpec::Dilated(c, inner) => c * inner.support_at(u),
        }
    }

    pub fn radial(&self, u: &UnitVector) -> f64 {
        self.radial_at(u.as_slice())
    }

    pub fn support(&self, u: &UnitVector) -> f64 {
        self.support_at(u.as_slice())
    }

    /// Lower and upper bounds `(m, M)` with `m ≤ ρ ≤ M`.
    pub fn radius_bounds(&self) -> (f64, f64) {
        match self {
            BodySpec::Ball { radius, .. } => (*radius, *radius),
            BodySpec::Cylinder {
                radius,
                half_height,
            } => (radius.min(*half_height), radius.hypot(*half_height)),
            BodySpec::DoubleCone {
                base_radius: a,
                apex_height: c,
            } => (a * c / a.hypot(*c), a.max(*c)),
            BodySpec::BumpSphere(b) => (1.0, b.surface.max_radius()),
            BodySpec::Polar(inner) => {
                let (m, big) = inner.radius_bounds();
                (1.0 / big, 1.0 / m)
            }
            BodySpec::Rotated(_, inner) => inner.radius_bounds(),
            BodySpec::Dilated(c, inner) => {
                let (m, big) = inner.radius_bounds();
                (c * m, c * big)
            }
        }
    }

    /// Declared bound `L` with `|ρ(u) − ρ(v)| ≤ L‖u − v‖` for unit `u, v`.
    ///
    /// For a convex body squeezed between balls of radii `m ≤ M` the radial
    /// function is `M²/m`-Lipschitz in the chordal metric. Bump spheres use
    /// the profile slope, converted from geodesic to chordal distance.
    pub fn radial_lipschitz(&self) -> f64 {
        match self {
            BodySpec::BumpSphere(b) => b.surface.lipschitz() * FRAC_PI_2,
            BodySpec::Rotated(_, inner) => inner.radial_lipschitz(),
            BodySpec::Dilated(c, inner) => c * inner.radial_lipschitz(),
            BodySpec::Ball { .. } => 0.0,
            _ => {
                let (m, big) = self.radius_bounds();
                big * big / m
            }
        }
    }

    /// Heights `z` at which the radial function has a kink along a whole
    /// latitude, for bodies of revolution about the `z`-axis. Used to split
    /// quadrature panels. Empty when unknown or smooth.
    pub fn radial_kinks(&self) -> Vec<f64> {
        match self {
            BodySpec::Cylinder {
                radius,
                half_height,
            } => {
                let z = half_height / radius.hypot(*half_height);
                vec![-z, z]
            }
            BodySpec::DoubleCone { .. } => vec![0.0],
            BodySpec::Polar(inner) => inner.support_kinks(),
            BodySpec::Dilated(_, inner) => inner.radial_kinks(),
            _ => Vec::new(),
        }
    }

    /// Latitudes where the support function has a kink.
    pub fn support_kinks(&self) -> Vec<f64> {
        match self {
            BodySpec::Cylinder { .. } => vec![0.0],
            BodySpec::DoubleCone {
                base_radius,
                apex_height,
            } => {
                let z = base_radius / base_radius.hypot(*apex_height);
                vec![-z, z]
            }
            BodySpec::Polar(inner) => inner.radial_kinks(),
            BodySpec::Dilated(_, inner) => inner.support_kinks(),
            _ => Vec::new(),
        }
    }

    /// Directions near which the radial function varies quickly (bump
    /// centers, points on sliding bands). Used to focus random sampling.
    pub fn feature_hints(&self) -> Vec<UnitVector> {
        match self {
            BodySpec::BumpSphere(b) => {
                let mut out: Vec<UnitVector> =
                    b.surface.caps().iter().map(|c| c.center.clone()).collect();
                for band in b.surface.bands() {
                    let frame = crate::geom::frame_for(&band.pole);
                    for k in 0..16 {
                        out.push(frame.direction(k as f64 * std::f64::consts::TAU / 16.0));
                    }
                }
                out
            }
            BodySpec::Rotated(r, inner) => {
                inner.feature_hints().iter().map(|u| r.apply(u)).collect()
            }
            BodySpec::Polar(inner) | BodySpec::Dilated(_, inner) => inner.feature_hints(),
            _ => Vec::new(),
        }
    }
}

/// The polar body `K* = {y : x·y ≤ 1 for all x ∈ K}`.
pub fn polar(spec: &BodySpec) -> BodySpec {
    BodySpec::Polar(Box::new(spec.clone()))
}

/// The rotated body `R·K`, with `ρ_{RK}(u) = ρ_K(Rᵀu)` and
/// `h_{RK}(u) = h_K(Rᵀu)`.
pub fn apply_rotation(spec: &BodySpec, rotation: &Rotation) -> Result<BodySpec> {
    if rotation.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            left: rotation.dim(),
            right: spec.dim(),
        });
    }
    Ok(BodySpec::Rotated(rotation.clone(), Box::new(spec.clone())))
}

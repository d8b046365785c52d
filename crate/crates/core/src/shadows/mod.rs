//! Two-dimensional shadows: sections (radial kind) and projections
//! (support kind) of bodies, as oracles over the in-plane polar angle.

mod curves;

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::bodies::{BodySpec, Scratch};
use crate::error::{Error, Result};
use crate::geom::{frame_for, meridian_direction, PlaneFrame, UnitVector};

pub use curves::{cone_section_rho, cylinder_section_rho, reduce_angle, u0};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShadowKind {
    /// `f` is the radial function of a section.
    Radial,
    /// `f` is the support function of a projection.
    Support,
}

impl fmt::Display for ShadowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShadowKind::Radial => "radial",
            ShadowKind::Support => "support",
        })
    }
}

type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Section(Arc<BodySpec>),
    Projection(Arc<BodySpec>),
    Cone { theta: f64 },
    Cylinder { r: f64, theta: f64 },
    Constant(f64),
    Custom(CurveFn),
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Section(b) => write!(f, "Section({b})"),
            Source::Projection(b) => write!(f, "Projection({b})"),
            Source::Cone { theta } => write!(f, "Cone {{ theta: {theta} }}"),
            Source::Cylinder { r, theta } => write!(f, "Cylinder {{ r: {r}, theta: {theta} }}"),
            Source::Constant(c) => write!(f, "Constant({c})"),
            Source::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A planar star-shaped (radial kind) or convex (support kind) set given by
/// `u ↦ f(u)` on the in-plane angle. Evaluation is
/// `scale · base(u − phase)`, so in-plane rotations and dilations are free.
#[derive(Clone, Debug)]
pub struct Shadow2D {
    frame: PlaneFrame,
    kind: ShadowKind,
    source: Source,
    phase: f64,
    scale: f64,
}

impl Shadow2D {
    fn new(frame: PlaneFrame, kind: ShadowKind, source: Source) -> Self {
        Shadow2D {
            frame,
            kind,
            source,
            phase: 0.0,
            scale: 1.0,
        }
    }

    /// Disk of radius `radius` (both kinds have `f ≡ radius`).
    pub fn disk(kind: ShadowKind, radius: f64) -> Self {
        Self::new(
            frame_for(&UnitVector::north_pole(3)),
            kind,
            Source::Constant(radius),
        )
    }

    /// A shadow from an arbitrary `2π`-periodic positive function.
    pub fn from_fn<F>(kind: ShadowKind, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            frame_for(&UnitVector::north_pole(3)),
            kind,
            Source::Custom(Arc::new(f)),
        )
    }

    /// Closed-form section of the unit double cone at angle `θ`.
    pub fn cone_section(theta: f64) -> Self {
        Self::new(
            frame_for(&meridian_direction(theta)),
            ShadowKind::Radial,
            Source::Cone { theta },
        )
    }

    /// Closed-form section of the cylinder of radius and half-height `r`.
    pub fn cylinder_section(r: f64, theta: f64) -> Self {
        Self::new(
            frame_for(&meridian_direction(theta)),
            ShadowKind::Radial,
            Source::Cylinder { r, theta },
        )
    }

    pub fn kind(&self) -> ShadowKind {
        self.kind
    }

    pub fn frame(&self) -> &PlaneFrame {
        &self.frame
    }

    /// Accumulated in-plane rotation angle.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    #[inline]
    fn base(&self, u: f64) -> f64 {
        match &self.source {
            Source::Section(body) => {
                let mut d: Scratch = Scratch::from_elem(0.0, self.frame.dim());
                self.frame.direction_into(u, &mut d);
                body.radial_at(&d)
            }
            Source::Projection(body) => {
                let mut d: Scratch = Scratch::from_elem(0.0, self.frame.dim());
                self.frame.direction_into(u, &mut d);
                body.support_at(&d)
            }
            Source::Cone { theta } => cone_section_rho(*theta, u),
            Source::Cylinder { r, theta } => cylinder_section_rho(*r, *theta, u),
            Source::Constant(c) => *c,
            Source::Custom(f) => f(u),
        }
    }

    /// `f(u)`.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.scale * self.base(u - self.phase)
    }

    /// The shadow dilated by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale *= c;
        out
    }
}

/// Radial-kind shadow `f(u) = ρ_K(cos u·e1 + sin u·e2)`.
///
/// For `n > 3` this is the planar slice spanned by the frame's first two
/// basis vectors; use [`HyperplaneSection`] for the full `(n−1)`-dimensional
/// section.
pub fn section_shadow(body: &BodySpec, frame: &PlaneFrame) -> Result<Shadow2D> {
    check_dims(body, frame)?;
    Ok(Shadow2D::new(
        frame.clone(),
        ShadowKind::Radial,
        Source::Section(Arc::new(body.clone())),
    ))
}

/// Support-kind shadow `f(u) = h_K(cos u·e1 + sin u·e2)`.
pub fn projection_shadow(body: &BodySpec, frame: &PlaneFrame) -> Result<Shadow2D> {
    check_dims(body, frame)?;
    Ok(Shadow2D::new(
        frame.clone(),
        ShadowKind::Support,
        Source::Projection(Arc::new(body.clone())),
    ))
}

fn check_dims(body: &BodySpec, frame: &PlaneFrame) -> Result<()> {
    if body.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            left: body.dim(),
            right: frame.dim(),
        });
    }
    Ok(())
}

/// The shadow rotated in-plane by `phi`: `f_rot(u) = f(u − φ)`.
pub fn rotated_shadow(s: &Shadow2D, phi: f64) -> Shadow2D {
    let mut out = s.clone();
    out.phase += phi;
    out
}

/// Area of a shadow.
///
/// Radial kind: `½∫ f² du` by the trapezoid rule. Support kind: the
/// enclosed area of the boundary `x(u) = f(u)(cos u, sin u) + f'(u)(−sin u,
/// cos u)`, which is `½∫ (f² − f'²) du` (the continuous shoelace formula),
/// with `f'` from a sixth-order central difference of step
/// `2π/resolution`. Both rules are spectrally accurate for smooth periodic
/// `f`; kinks of `f` (edges of the shadow) cost `O(1/resolution)`.
pub fn shadow_area(s: &Shadow2D, resolution: usize) -> Result<f64> {
    if resolution < 64 {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} < 64"
        )));
    }
    let du = TAU / resolution as f64;
    let values: Vec<f64> = (0..resolution).map(|k| s.eval(k as f64 * du)).collect();
    match s.kind {
        ShadowKind::Radial => Ok(0.5 * du * values.iter().map(|f| f * f).sum::<f64>()),
        ShadowKind::Support => {
            let n = resolution;
            let at =
                |k: usize, off: isize| values[(k as isize + off).rem_euclid(n as isize) as usize];
            // In the rotating frame x = (h, h') and x' = (0, h + h''), so
            // x × x' = h (h + h''); integrating by parts gives h² − h'².
            let mut area = 0.0;
            for (k, h) in values.iter().enumerate() {
                let dh = (45.0 * (at(k, 1) - at(k, -1)) - 9.0 * (at(k, 2) - at(k, -2))
                    + (at(k, 3) - at(k, -3)))
                    / (60.0 * du);
                area += h * h - dh * dh;
            }
            let area = 0.5 * du * area;
            if area < 0.0 {
                return Err(Error::NonConvexSupport { area });
            }
            Ok(area)
        }
    }
}

/// Section of an `n`-dimensional star body by the hyperplane `ξ^⊥`, as a
/// radial function on the unit sphere of the hyperplane written in the
/// frame's basis coordinates.
#[derive(Clone, Debug)]
pub struct HyperplaneSection {
    body: Arc<BodySpec>,
    frame: PlaneFrame,
}

impl HyperplaneSection {
    pub fn new(body: &BodySpec, xi: &UnitVector) -> Result<Self> {
        let frame = frame_for(xi);
        check_dims(body, &frame)?;
        Ok(HyperplaneSection {
            body: Arc::new(body.clone()),
            frame,
        })
    }

    /// Dimension of the hyperplane.
    pub fn dim(&self) -> usize {
        self.frame.dim() - 1
    }

    pub fn frame(&self) -> &PlaneFrame {
        &self.frame
    }

    /// `ρ_K(Σ w_i e_i)` for a unit `w ∈ S^{n−2}`.
    pub fn radial(&self, w: &[f64]) -> f64 {
        self.body.radial_at(&self.frame.embed(w))
    }
}

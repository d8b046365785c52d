//! Convex and star bodies described by radial and support functions, their
//! two-dimensional shadows, and numerical checks of whether shadows or whole
//! bodies fit inside one another after a rotation.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod casestudies;
pub mod error;
pub mod fitting;
pub mod geom;
pub mod integrals;
pub mod shadows;

pub use bodies::{apply_rotation, polar, BodySpec};
pub use error::{Error, Result};
pub use fitting::{best_rotation_fit, containment_margin, FitConfig, FitResult};
pub use geom::{frame_for, sphere_grid, GridKind, PlaneFrame, Rotation, SphereGrid, UnitVector};
pub use shadows::{projection_shadow, section_shadow, Shadow2D, ShadowKind};

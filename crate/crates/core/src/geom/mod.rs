//! Directions, plane frames, rotations and quadrature grids on spheres.
//!
//! Everything here is immutable after construction and can be shared
//! freely between threads.

mod frame;
mod grid;
mod optimize;
mod quadrature;
mod rotation;
mod vector;

pub(crate) use frame::cross;
pub use frame::{frame_for, meridian_direction, PlaneFrame};
pub use grid::{sphere_grid, sphere_surface_area, GridKind, SphereGrid};
pub use optimize::golden_max;
pub use quadrature::gauss_legendre;
pub use rotation::Rotation;
pub use vector::{dot, norm, unit, UnitVector};

/// Tolerance for objects built directly from normalized input.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for composed objects (products of rotations, etc.).
pub const COMPOSED_TOL: f64 = 1e-10;

//! The worked examples: a cylinder and a double cone in `R^3`, and bumped
//! spheres in higher dimensions.

mod bump;
mod cylinder_cone;
mod lune;
mod report;

pub use bump::{
    build_bump_bodies, build_bump_body, bump_placement, convexity_check, convexity_violation,
    probe_grid, simplex_vertices, verify_bump_case, BigBump, BumpParams, BumpPlacement, BumpRole,
    ConvexityViolation, CONSTRUCTION_PAIR_SAMPLES,
};
pub use cylinder_cone::{
    bisect_margin_zero, critical_angles, critical_angles_by_bisection, critical_angles_unchecked,
    no3drot_preimage, no3drot_rotation, no3drot_witness, r_max, strategies_at, strategy_margin,
    verify_cylinder_cone, verify_no3drot, verify_rot1, CriticalAngles, No3dWitness, Rot1Check,
    Strategy, NO3DROT_PROBE_RESOLUTION,
};
pub use lune::lune_width;
pub use report::{fmt_f64, CaseReport, CaseRow, Verdict};

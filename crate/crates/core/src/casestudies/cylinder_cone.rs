//! The cylinder of radius and half-height `r` against the unit double cone.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{fmt_f64, CaseReport, CaseRow, Verdict};
use crate::bodies::BodySpec;
use crate::error::{Error, Result};
use crate::fitting::{
    best_rotation_fit, containment_margin, refined_margin, so3_fit_search, FitConfig,
};
use crate::geom::{frame_for, meridian_direction, sphere_grid, GridKind, Rotation, UnitVector};
use crate::shadows::{rotated_shadow, section_shadow, u0, Shadow2D};

/// Upper end `√(2 − √3)` of the admissible radii.
pub fn r_max() -> f64 {
    (2.0 - 3f64.sqrt()).sqrt()
}

/// Section angles at which the fitting strategy changes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalAngles {
    /// Largest angle at which the unrotated section fits.
    pub theta0: f64,
    /// Corner-contact angle ending the quarter-turn strategy.
    pub theta1: f64,
    /// Touching angle starting the `u0` strategy.
    pub theta2: f64,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.5 && r < r_max()) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "(1/2, √(2−√3))",
        });
    }
    Ok(())
}

/// Critical angles for `r` strictly inside `(1/2, √(2−√3))`.
pub fn critical_angles(r: f64) -> Result<CriticalAngles> {
    check_radius(r)?;
    Ok(critical_angles_unchecked(r))
}

/// The closed forms without the domain check, for `r ∈ [1/2, √(2−√3)]`.
///
/// `θ₂` uses `cos 2θ₂ = −√(4r²−1)/(2r²)` with `2θ₂ ∈ (π/2, π)`.
pub fn critical_angles_unchecked(r: f64) -> CriticalAngles {
    let r2 = r * r;
    let q = (4.0 * r2 - 1.0).max(0.0).sqrt() / (2.0 * r2);
    CriticalAngles {
        theta0: ((1.0 - r) / r).atan(),
        theta1: 0.5 * (q - 1.0).clamp(-1.0, 1.0).acos(),
        theta2: 0.5 * (-q).clamp(-1.0, 1.0).acos(),
    }
}

/// Result of checking the quarter-turn inequality at `θ = π/4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rot1Check {
    /// `r⁴(8r² − 3)`.
    pub discriminant: f64,
    pub discriminant_negative: bool,
    /// `min_u RHS − LHS` over the open grid `u_k = (k + ½)·π/(2N)`.
    pub grid_min: f64,
    pub passed: bool,
}

/// Checks that the quarter-turned cylinder section lies inside the cone
/// section at `θ = π/4`: squared radial functions
/// `r² csc²u / (½ + cot²u) < sec²u / (1/√2 + √(tan²u + ½))²` on `(0, π/2)`.
pub fn verify_rot1(r: f64, u_grid: usize) -> Result<Rot1Check> {
    check_radius(r)?;
    if u_grid < 2 {
        return Err(Error::InvalidParameter(format!("u_grid {u_grid} < 2")));
    }
    let r2 = r * r;
    let discriminant = r2 * r2 * (8.0 * r2 - 3.0);
    let h = FRAC_PI_2 / u_grid as f64;
    let grid_min = (0..u_grid)
        .map(|k| {
            let u = (k as f64 + 0.5) * h;
            let (s, c) = u.sin_cos();
            let cot = c / s;
            let tan = s / c;
            let lhs = r2 / (s * s) / (0.5 + cot * cot);
            let rhs = 1.0
                / (c * c)
                / (std::f64::consts::FRAC_1_SQRT_2 + (tan * tan + 0.5).sqrt()).powi(2);
            rhs - lhs
        })
        .fold(f64::INFINITY, f64::min);
    let discriminant_negative = discriminant < 0.0;
    Ok(Rot1Check {
        discriminant,
        discriminant_negative,
        grid_min,
        passed: discriminant_negative && grid_min > 0.0,
    })
}

/// Which in-plane rotation is applied to the cylinder section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Identity,
    QuarterTurn,
    U0,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Identity => "identity",
            Strategy::QuarterTurn => "quarter_turn",
            Strategy::U0 => "u0",
        }
    }

    /// Rotation angle at section angle `theta`.
    pub fn angle(self, theta: f64) -> Result<f64> {
        match self {
            Strategy::Identity => Ok(0.0),
            Strategy::QuarterTurn => Ok(FRAC_PI_2),
            Strategy::U0 => u0(theta),
        }
    }
}

/// Margin of the cylinder section at `theta`, rotated by `strategy`, inside
/// the cone section. With `refine`, grid minima are polished continuously.
pub fn strategy_margin(
    r: f64,
    theta: f64,
    strategy: Strategy,
    u_grid: usize,
    refine: bool,
) -> Result<f64> {
    let a = rotated_shadow(
        &Shadow2D::cylinder_section(r, theta),
        strategy.angle(theta)?,
    );
    let b = Shadow2D::cone_section(theta);
    if refine {
        refined_margin(&a, &b, u_grid)
    } else {
        containment_margin(&a, &b, u_grid)
    }
}

/// Strategies valid at `theta` for the given critical angles.
pub fn strategies_at(theta: f64, angles: &CriticalAngles) -> Vec<Strategy> {
    let mut out = Vec::new();
    if theta <= angles.theta0 {
        out.push(Strategy::Identity);
    }
    if theta > angles.theta0 && theta <= angles.theta1 {
        out.push(Strategy::QuarterTurn);
    }
    if theta >= angles.theta2 && theta > FRAC_PI_4 {
        out.push(Strategy::U0);
    }
    out
}

/// Bisection for the sign change of `θ ↦ strategy_margin(θ)` on `[lo, hi]`,
/// using refined margins.
pub fn bisect_margin_zero(
    r: f64,
    strategy: Strategy,
    lo: f64,
    hi: f64,
    u_grid: usize,
) -> Result<f64> {
    let f = |t: f64| strategy_margin(r, t, strategy, u_grid, true);
    let (mut lo, mut hi) = (lo, hi);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::DegenerateConfig(format!(
            "margin has the same sign at both ends ({flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `θ₁` and `θ₂` recovered as zeros of the quarter-turn and `u0` strategy
/// margins on `(π/4, π/2)`.
pub fn critical_angles_by_bisection(r: f64, u_grid: usize) -> Result<(f64, f64)> {
    check_radius(r)?;
    let lo = FRAC_PI_4 + 1e-9;
    let theta1 = bisect_margin_zero(r, Strategy::QuarterTurn, lo, FRAC_PI_2, u_grid)?;
    let theta2 = bisect_margin_zero(r, Strategy::U0, lo, FRAC_PI_2, u_grid)?;
    Ok((theta1, theta2))
}

/// Checks that every section of the cylinder `C = cylinder(r, r)` fits,
/// after an in-plane rotation, inside the corresponding section of the
/// unit double cone, on `theta_grid` angles uniformly covering `[0, π/2]`.
///
/// Each angle is checked twice: with the closed-form strategy rotation and
/// with a blind rotation search on generic sections of the two bodies.
pub fn verify_cylinder_cone(r: f64, theta_grid: usize, cfg: &FitConfig) -> Result<CaseReport> {
    check_radius(r)?;
    cfg.validate()?;
    if theta_grid < 2 {
        return Err(Error::InvalidParameter(format!(
            "theta_grid {theta_grid} < 2"
        )));
    }
    let start = Instant::now();
    let angles = critical_angles_unchecked(r);
    let cylinder = BodySpec::cylinder(r, r);
    let cone = BodySpec::double_cone(1.0, 1.0);
    let step = FRAC_PI_2 / (theta_grid - 1) as f64;

    let rows: Vec<CaseRow> = (0..theta_grid)
        .into_par_iter()
        .map(|i| -> Result<CaseRow> {
            let theta = if i + 1 == theta_grid {
                FRAC_PI_2
            } else {
                i as f64 * step
            };
            let mut best: Option<(Strategy, f64)> = None;
            for s in strategies_at(theta, &angles) {
                let m = strategy_margin(r, theta, s, cfg.u_grid, false)?;
                if best.is_none_or(|(_, b)| m > b) {
                    best = Some((s, m));
                }
            }
            let (strategy, margin) = best.expect("every angle has a strategy");
            let frame = frame_for(&meridian_direction(theta));
            let a = section_shadow(&cylinder, &frame)?;
            let b = section_shadow(&cone, &frame)?;
            let blind = best_rotation_fit(&a, &b, cfg)?;
            Ok(CaseRow {
                key: theta,
                strategy: strategy.name().into(),
                margin,
                blind_margin: Some(blind.min_margin),
                ok: margin >= -cfg.tol && blind.found,
            })
        })
        .collect::<Result<_>>()?;

    let min_margin = rows
        .iter()
        .flat_map(|row| [row.margin, row.blind_margin.unwrap_or(f64::INFINITY)])
        .fold(f64::INFINITY, f64::min);
    let failing: Vec<String> = rows
        .iter()
        .filter(|row| !row.ok)
        .map(|row| format!("{:.6}", row.key))
        .collect();
    let verdict = if failing.is_empty() {
        Verdict::Verified
    } else {
        Verdict::Failed(format!("no fit at theta = {}", failing.join(", ")))
    };
    let rot1 = verify_rot1(r, 4096)?;
    let verdict = match verdict {
        Verdict::Verified if !rot1.passed => {
            Verdict::Failed("quarter-turn inequality at π/4".into())
        }
        v => v,
    };
    Ok(CaseReport {
        title: "cylinder sections inside double cone sections".into(),
        key_name: "theta".into(),
        params: vec![
            ("r".into(), r.to_string()),
            ("theta_grid".into(), theta_grid.to_string()),
            ("angle_grid".into(), cfg.angle_grid.to_string()),
            ("u_grid".into(), cfg.u_grid.to_string()),
            ("refine_iters".into(), cfg.refine_iters.to_string()),
            ("tol".into(), cfg.tol.to_string()),
            ("theta0".into(), fmt_f64(angles.theta0)),
            ("theta1".into(), fmt_f64(angles.theta1)),
            ("theta2".into(), fmt_f64(angles.theta2)),
        ],
        rows,
        notes: vec![
            format!("discriminant r^4(8r^2-3) = {}", fmt_f64(rot1.discriminant)),
            format!(
                "quarter-turn inequality grid minimum = {}",
                fmt_f64(rot1.grid_min)
            ),
        ],
        verdict,
        min_margin,
        runtime: start.elapsed(),
    })
}

/// Point of the rotated cylinder that leaves the cone, and by how much.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct No3dWitness {
    pub point: [f64; 3],
    /// `z − (1 − √(x² + y²))`, positive outside the cone.
    pub margin: f64,
}

/// For a rotation by `phi` about the `x`-axis, the rim point
/// `P = (r cos α₀, r sin α₀, r)` with `sin α₀ = (1 − cos φ)/sin φ = tan(φ/2)` is
/// mapped to height `r` at horizontal distance `r`, outside the cone by
/// `2r − 1`.
pub fn no3drot_witness(r: f64, phi: f64) -> Result<No3dWitness> {
    if !(phi > 0.0 && phi <= FRAC_PI_2) {
        return Err(Error::Domain {
            what: "phi",
            value: phi,
            domain: "(0, π/2]",
        });
    }
    if !(r > 0.5) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "(1/2, ∞)",
        });
    }
    let (sp, cp) = phi.sin_cos();
    let alpha0 = (0.5 * phi).tan().min(1.0).asin();
    let (sa, ca) = alpha0.sin_cos();
    let point = [r * ca, r * sa * cp - r * sp, r];
    let horizontal = point[0].hypot(point[1]);
    debug_assert!((horizontal - r).abs() < 1e-12);
    Ok(No3dWitness {
        point,
        margin: point[2] - (1.0 - horizontal),
    })
}

/// The rim point before rotation, for cross-checks.
pub fn no3drot_preimage(r: f64, phi: f64) -> [f64; 3] {
    let alpha0 = (0.5 * phi).tan().min(1.0).asin();
    [r * alpha0.cos(), r * alpha0.sin(), r]
}

/// Rotation about the `x`-axis used by the witness.
pub fn no3drot_rotation(phi: f64) -> Rotation {
    Rotation::about_axis(&UnitVector::axis(3, 0), phi)
}

/// Witness margins for `phi_grid` angles `φ_k = kπ/(2·phi_grid)`, `k = 1..`,
/// followed by a search over `n_rotations` seeded random rotations for one
/// that places the cylinder inside the cone on a product probe grid.
pub fn verify_no3drot(
    r: f64,
    phi_grid: usize,
    n_rotations: usize,
    seed: u64,
) -> Result<CaseReport> {
    check_radius(r)?;
    if phi_grid == 0 {
        return Err(Error::InvalidParameter("phi_grid must be positive".into()));
    }
    let start = Instant::now();
    let expected = 2.0 * r - 1.0;
    let mut rows = Vec::with_capacity(phi_grid);
    for k in 1..=phi_grid {
        let phi = FRAC_PI_2 * k as f64 / phi_grid as f64;
        let w = no3drot_witness(r, phi)?;
        rows.push(CaseRow {
            key: phi,
            strategy: "witness".into(),
            margin: w.margin,
            blind_margin: None,
            ok: w.margin > 0.0 && (w.margin - expected).abs() <= 1e-12,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rotations: Vec<Rotation> = (0..n_rotations)
        .map(|_| Rotation::random(3, &mut rng))
        .collect();
    let grid = sphere_grid(3, NO3DROT_PROBE_RESOLUTION, GridKind::Product)?;
    let found = so3_fit_search(
        &BodySpec::cylinder(r, r),
        &BodySpec::double_cone(1.0, 1.0),
        &rotations,
        &grid,
        1e-9,
    )?;
    let min_margin = rows
        .iter()
        .map(|row| row.margin)
        .fold(f64::INFINITY, f64::min);
    let bad = rows.iter().filter(|row| !row.ok).count();
    let verdict = match (bad, &found) {
        (0, None) => Verdict::Verified,
        (0, Some(_)) => Verdict::Failed("a sampled rotation fits".into()),
        (n, _) => Verdict::Failed(format!("{n} witness margins differ from 2r - 1")),
    };
    Ok(CaseReport {
        title: "no rotation of the cylinder fits in the double cone".into(),
        key_name: "phi".into(),
        params: vec![
            ("r".into(), r.to_string()),
            ("phi_grid".into(), phi_grid.to_string()),
            ("rotations".into(), n_rotations.to_string()),
            ("seed".into(), seed.to_string()),
            ("probe_nodes".into(), grid.len().to_string()),
        ],
        rows,
        notes: vec![
            format!("expected witness margin 2r - 1 = {}", fmt_f64(expected)),
            format!(
                "fitting rotation among samples: {}",
                found.map_or("none".to_string(), |rot| format!("{:?}", rot.to_rows()))
            ),
        ],
        verdict,
        min_margin,
        runtime: start.elapsed(),
    })
}

/// Product-grid resolution of the probe directions used by [`verify_no3drot`].
pub const NO3DROT_PROBE_RESOLUTION: usize = 64;

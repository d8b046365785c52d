//! Closed-form section curves of the unit double cone and the cylinder of
//! radius `r` and half-height `r`, cut by the plane normal to
//! `(-sin θ, 0, cos θ)` and written in the meridian frame.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Reduces `u` to `[0, π/2]` using `f(-u) = f(u)` and `f(π - u) = f(u)`.
#[inline]
pub fn reduce_angle(u: f64) -> f64 {
    let w = u.rem_euclid(PI);
    if w > FRAC_PI_2 {
        PI - w
    } else {
        w
    }
}

/// Section of the double cone with apex height and base radius 1:
/// `sec u / (sin θ + √(tan²u + cos²θ))`, written without the secant so the
/// limit `u → π/2` (value 1) is attained directly.
#[inline]
pub fn cone_section_rho(theta: f64, u: f64) -> f64 {
    let w = reduce_angle(u);
    let (s, c) = w.sin_cos();
    let ct = theta.cos();
    1.0 / (c * theta.sin() + (s * s + c * c * ct * ct).sqrt())
}

/// Angle at which the flat top of the cylinder starts to bound the section:
/// `arctan √(sin²θ − cos²θ)`, defined for `θ ∈ (π/4, π/2]`.
pub fn u0(theta: f64) -> Result<f64> {
    if !(theta > FRAC_PI_4 && theta <= FRAC_PI_2) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "(π/4, π/2]",
        });
    }
    Ok(u0_unchecked(theta))
}

#[inline]
fn u0_unchecked(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (s * s - c * c).max(0.0).sqrt().atan()
}

/// Section of the cylinder `{x² + y² ≤ r², |z| ≤ r}`.
///
/// For `θ ≤ π/4` this is the ellipse `r sec u / √(tan²u + cos²θ)`; beyond,
/// it is truncated to `r sec u csc θ` for `u < u0(θ)`.
#[inline]
pub fn cylinder_section_rho(r: f64, theta: f64, u: f64) -> f64 {
    let w = reduce_angle(u);
    if theta > FRAC_PI_4 && w < u0_unchecked(theta) {
        return r / (w.cos() * theta.sin());
    }
    let (s, c) = w.sin_cos();
    let ct = theta.cos();
    r / (s * s + c * c * ct * ct).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::BodySpec;
    use crate::geom::{frame_for, meridian_direction};
    use approx::assert_abs_diff_eq;

    #[test]
    fn reduction_is_even_and_pi_symmetric() {
        for k in 0..100 {
            let u = -7.0 + 0.14 * k as f64;
            let w = reduce_angle(u);
            assert!((0.0..=FRAC_PI_2).contains(&w));
            assert_abs_diff_eq!(w, reduce_angle(-u), epsilon = 1e-12);
            assert_abs_diff_eq!(w, reduce_angle(PI - u), epsilon = 1e-12);
        }
    }

    #[test]
    fn cone_special_values() {
        for k in 0..=10 {
            let t = FRAC_PI_2 * k as f64 / 10.0;
            assert_abs_diff_eq!(cone_section_rho(t, FRAC_PI_2), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(
                cone_section_rho(t, 0.0),
                1.0 / (t.sin() + t.cos()),
                epsilon = 1e-15
            );
            if t > FRAC_PI_4 {
                let u = u0(t).unwrap();
                assert_abs_diff_eq!(
                    cone_section_rho(t, u),
                    std::f64::consts::FRAC_1_SQRT_2,
                    epsilon = 1e-12
                );
            }
        }
        assert_abs_diff_eq!(
            cone_section_rho(FRAC_PI_4, 0.0),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        for k in 0..20 {
            assert_abs_diff_eq!(cone_section_rho(0.0, 0.3 * k as f64), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cylinder_special_values() {
        let r = 0.51;
        for k in 1..=10 {
            let t = FRAC_PI_4 + FRAC_PI_4 * k as f64 / 10.0;
            let u = u0(t).unwrap();
            assert_abs_diff_eq!(
                cylinder_section_rho(r, t, u),
                2f64.sqrt() * r,
                epsilon = 1e-12
            );
        }
        for k in 0..=10 {
            let t = FRAC_PI_4 * k as f64 / 10.0;
            assert_abs_diff_eq!(
                cylinder_section_rho(r, t, 0.0),
                r / t.cos(),
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(cylinder_section_rho(r, t, FRAC_PI_2), r, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(cylinder_section_rho(r, FRAC_PI_2, 0.0), r, epsilon = 1e-15);
    }

    #[test]
    fn u0_values_and_domain() {
        assert_abs_diff_eq!(u0(FRAC_PI_2).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert!(u0(FRAC_PI_4 + 1e-9).unwrap() < 1e-4);
        // atan √(sin²1.2 − cos²1.2) = atan √(−cos 2.4)
        assert_abs_diff_eq!(u0(1.2).unwrap(), 0.709_532_621_370_292_8, epsilon = 1e-12);
        assert!(matches!(u0(FRAC_PI_4), Err(Error::Domain { .. })));
        assert!(u0(0.3).is_err());
        assert!(u0(1.6).is_err());
    }

    #[test]
    fn u0_is_where_generic_section_switches_faces() {
        // At u0 the section point hits the rim: |z| = x² + y² = r-scaled.
        let t: f64 = 1.2;
        let f = frame_for(&meridian_direction(t));
        let u = u0(t).unwrap();
        let mut d = [0.0; 3];
        f.direction_into(u, &mut d);
        assert_abs_diff_eq!(d[0].hypot(d[1]), d[2].abs(), epsilon = 1e-12);
        // Just before u0 the top face binds, just after the side does.
        let cyl = BodySpec::cylinder(1.0, 1.0);
        for (du, top) in [(-1e-3, true), (1e-3, false)] {
            f.direction_into(u + du, &mut d);
            let rho = cyl.radial_at(&d);
            assert_eq!((rho * d[2].abs() - 1.0).abs() < 1e-12, top);
        }
    }

    #[test]
    fn closed_forms_match_generic_sections() {
        let cone = BodySpec::double_cone(1.0, 1.0);
        let r = 0.51;
        let cyl = BodySpec::cylinder(r, r);
        let mut d = [0.0; 3];
        for i in 0..50 {
            let t = FRAC_PI_2 * i as f64 / 49.0;
            let f = frame_for(&meridian_direction(t));
            for j in 0..200 {
                let u = std::f64::consts::TAU * j as f64 / 200.0;
                f.direction_into(u, &mut d);
                assert_abs_diff_eq!(cone_section_rho(t, u), cone.radial_at(&d), epsilon = 1e-10);
                assert_abs_diff_eq!(
                    cylinder_section_rho(r, t, u),
                    cyl.radial_at(&d),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn monotonicity_on_grids() {
        let r = 0.51;
        let us: Vec<f64> = (0..=200).map(|k| FRAC_PI_2 * k as f64 / 200.0).collect();
        let ts: Vec<f64> = (0..=100).map(|k| FRAC_PI_4 * k as f64 / 100.0).collect();
        for &t in &ts {
            for w in us.windows(2) {
                assert!(cone_section_rho(t, w[1]) >= cone_section_rho(t, w[0]) - 1e-15);
                if t > 0.0 {
                    assert!(cylinder_section_rho(r, t, w[1]) < cylinder_section_rho(r, t, w[0]));
                }
            }
        }
        for &u in &us {
            // Past π/4 the section along u = 0 grows again (ρ = 1/(sin θ + cos θ)).
            for w in ts.windows(2) {
                assert!(cone_section_rho(w[1], u) <= cone_section_rho(w[0], u) + 1e-15);
            }
            for w in ts.windows(2) {
                if u < FRAC_PI_2 {
                    assert!(cylinder_section_rho(r, w[1], u) > cylinder_section_rho(r, w[0], u));
                }
            }
        }
    }
}
